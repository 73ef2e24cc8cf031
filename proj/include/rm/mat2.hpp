#pragma once

#include <array>
#include <string>

#include "rm/numeric.hpp"
#include "rm/poly.hpp"

namespace rm {

// 2x2 matrix, entries row-major: [[m[0], m[1]], [m[2], m[3]]].
template <class T>
struct Mat2 {
    std::array<T, 4> m;

    Mat2() = default;
    Mat2(T a, T b, T c, T d) : m{std::move(a), std::move(b), std::move(c), std::move(d)} {}

    T& operator()(int r, int c) { return m[static_cast<size_t>(2 * r + c)]; }
    const T& operator()(int r, int c) const { return m[static_cast<size_t>(2 * r + c)]; }

    friend Mat2 operator*(const Mat2& A, const Mat2& B) {
        return Mat2(A.m[0] * B.m[0] + A.m[1] * B.m[2], A.m[0] * B.m[1] + A.m[1] * B.m[3],
                    A.m[2] * B.m[0] + A.m[3] * B.m[2], A.m[2] * B.m[1] + A.m[3] * B.m[3]);
    }

    friend bool operator==(const Mat2& A, const Mat2& B) { return A.m == B.m; }
    friend bool operator!=(const Mat2& A, const Mat2& B) { return !(A == B); }

    T det() const { return m[0] * m[3] - m[1] * m[2]; }
    T trace() const { return m[0] + m[3]; }
    Mat2 adjugate() const { return Mat2(m[3], -m[1], -m[2], m[0]); }
};

using IntMat = Mat2<BigInt>;
using RatMat = Mat2<BigRational>;
using PolyMat = Mat2<IntPolynomial>;

inline IntMat identity_int() { return IntMat(1, 0, 0, 1); }

// In-place V <- V * M without temporaries beyond four products.
void mul_into(IntMat& V, const IntMat& M);

BigInt mat2_content(const IntMat& A);
IntMat divide_content(const IntMat& A, BigInt* g = nullptr);

BigInt poly_mat_content(const PolyMat& A);

PolyMat poly_mat_mul(const PolyMat& A, const PolyMat& B);
IntPolynomial poly_mat_det(const PolyMat& A);
PolyMat poly_mat_map(const PolyMat& A, const std::vector<IntPolynomial>& subs);
PolyMat poly_mat_identity(const std::vector<std::string>& vars);
IntMat eval_int(const PolyMat& A, const std::vector<BigInt>& point);

}  // namespace rm
