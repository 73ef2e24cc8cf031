#include "rm/mat2.hpp"

namespace rm {

void mul_into(IntMat& V, const IntMat& M) {
    BigInt a = V.m[0] * M.m[0] + V.m[1] * M.m[2];
    BigInt b = V.m[0] * M.m[1] + V.m[1] * M.m[3];
    BigInt c = V.m[2] * M.m[0] + V.m[3] * M.m[2];
    BigInt d = V.m[2] * M.m[1] + V.m[3] * M.m[3];
    V.m[0].swap(a);
    V.m[1].swap(b);
    V.m[2].swap(c);
    V.m[3].swap(d);
}

BigInt mat2_content(const IntMat& A) {
    BigInt g = 0;
    for (const auto& e : A.m) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
    return g;
}

IntMat divide_content(const IntMat& A, BigInt* g) {
    BigInt c = mat2_content(A);
    if (g) *g = c;
    if (c == 0 || c == 1) return A;
    IntMat r;
    for (size_t i = 0; i < 4; ++i) mpz_divexact(r.m[i].get_mpz_t(), A.m[i].get_mpz_t(), c.get_mpz_t());
    return r;
}

BigInt poly_mat_content(const PolyMat& A) {
    BigInt g = 0;
    for (const auto& e : A.m) {
        BigInt c = content(e);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    }
    return g;
}

PolyMat poly_mat_mul(const PolyMat& A, const PolyMat& B) { return A * B; }

IntPolynomial poly_mat_det(const PolyMat& A) { return A.det(); }

PolyMat poly_mat_map(const PolyMat& A, const std::vector<IntPolynomial>& subs) {
    return PolyMat(A.m[0].substitute(subs), A.m[1].substitute(subs), A.m[2].substitute(subs),
                   A.m[3].substitute(subs));
}

PolyMat poly_mat_identity(const std::vector<std::string>& vars) {
    return PolyMat(IntPolynomial::constant(vars, 1), IntPolynomial(vars), IntPolynomial(vars),
                   IntPolynomial::constant(vars, 1));
}

IntMat eval_int(const PolyMat& A, const std::vector<BigInt>& point) {
    return IntMat(A.m[0].eval(point), A.m[1].eval(point), A.m[2].eval(point), A.m[3].eval(point));
}

}  // namespace rm
