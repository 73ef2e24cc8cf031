#include "doctest.h"

#include <functional>

#include "rm/mat2.hpp"
#include "rm/numeric.hpp"
#include "rm/poly.hpp"

using namespace rm;

namespace {

rm_status code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return RM_OK;
}

}  // namespace

TEST_CASE("parse expands to canonical form") {
    CHECK(parse_poly("n^3+(n+1)^3", {"n"}).str() == "2*n^3+3*n^2+3*n+1");
    CHECK(parse_poly("17*(n^3+(n+1)^3)-12*(2*n+1)", {"n"}).str() == "34*n^3+51*n^2+27*n+5");
    auto p = parse_poly("x^3 + (x+1)^3 + 2*y*(y-1)*(2*x+1)", {"x", "y"});
    CHECK(p.eval(std::vector<BigInt>{1, 1}) == 9);
    CHECK(p.degree_in(0) == 3);
    CHECK(p.degree_in(1) == 2);
}

TEST_CASE("parse accepts leading signs and literal-parenthesis products") {
    CHECK(parse_poly("-n^6", {"n"}).str() == "-n^6");
    CHECK(parse_poly("12(2*n+1)", {"n"}).str() == "24*n+12");
    CHECK(parse_poly("-(n-1)^2", {"n"}).str() == "-n^2+2*n-1");
    CHECK(parse_poly("0", {"n"}).is_zero());
    CHECK(parse_poly("(n+1)^0", {"n"}).str() == "1");
}

TEST_CASE("parse errors") {
    CHECK(code_of([] { parse_poly("n^", {"n"}); }) == RM_ERR_SYNTAX);
    CHECK(code_of([] { parse_poly("2n", {"n"}); }) == RM_ERR_SYNTAX);
    CHECK(code_of([] { parse_poly("(n+1", {"n"}); }) == RM_ERR_SYNTAX);
    CHECK(code_of([] { parse_poly("n+m", {"n"}); }) == RM_ERR_UNKNOWN_VARIABLE);
    try {
        parse_poly("n + * 2", {"n"});
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("at byte") != std::string::npos);
    }
}

TEST_CASE("evaluation") {
    auto p = parse_poly("2*n^3+3*n^2+3*n+1", {"n"});
    CHECK(p.eval(std::vector<BigInt>{2}) == 35);
    CHECK(parse_poly("34*n^3+51*n^2+27*n+5", {"n"}).eval(std::vector<BigInt>{0}) == 5);
    auto q = parse_poly("x*y^2-7*x+11", {"x", "y"});
    CHECK(q.eval(std::vector<BigInt>{0, 0}) == q.constant_term());
    CHECK(q.eval(std::vector<BigRational>{BigRational(1, 2), BigRational(2)}) == BigRational(19, 2));
    CHECK(code_of([&] { q.eval(std::vector<BigInt>{1}); }) == RM_ERR_ARITY);
    CHECK(eval_at(dense_coeffs(p), 2) == 35);
}

TEST_CASE("ring operations") {
    std::vector<std::string> v = {"x", "y"};
    auto a = parse_poly("x+y", v), b = parse_poly("x-y", v);
    CHECK((a * b).str() == "x^2-y^2");
    CHECK((a + b).str() == "2*x");
    CHECK((a - a).is_zero());
    CHECK(a.pow(3) == a * a * a);
    CHECK(a.shifted(0, BigInt(1)).str() == "x+y+1");
    auto c = parse_poly("n", {"n"});
    CHECK(code_of([&] { (void)(a + with_vars(c, {"n"})); }) == RM_ERR_RING_MISMATCH);
    CHECK(a.total_degree() == 1);
    CHECK(IntPolynomial(v).total_degree() == -1);
}

TEST_CASE("content, exact division and univariate gcd") {
    auto p = parse_poly("6*n^2+4*n+2", {"n"});
    CHECK(content(p) == 2);
    CHECK(exact_div(p, BigInt(2)).str() == "3*n^2+2*n+1");
    auto a = parse_poly("(n+1)^2*(n+2)", {"n"});
    auto b = parse_poly("(n+1)*(n+3)", {"n"});
    CHECK(gcd_univariate(a, b).str() == "n+1");
    auto q = div_univariate(a, parse_poly("n+2", {"n"}));
    REQUIRE(q);
    CHECK(q->str() == "n^2+2*n+1");
    CHECK(!div_univariate(a, parse_poly("n+5", {"n"})));
    auto r = divide_exact(to_rational(parse_poly("x^2-y^2", {"x", "y"})), to_rational(parse_poly("x+y", {"x", "y"})));
    REQUIRE(r);
    CHECK(clear_denominators(*r).str() == "x-y");
    CHECK(from_dense({BigInt(1), BigInt(0), BigInt(3)}, "n").str() == "3*n^2+1");
}

TEST_CASE("2x2 matrices") {
    IntMat M(1, 2, 3, 4);
    CHECK(identity_int() * M == M);
    CHECK(M * identity_int() == M);
    CHECK(M.det() == -2);
    CHECK(M.trace() == 5);
    CHECK(M * M.adjugate() == IntMat(-2, 0, 0, -2));
    IntMat step(0, BigInt(-7), 1, 9);
    CHECK(step.det() == 7);
    CHECK(mat2_content(IntMat(6, 4, 2, 8)) == 2);
    BigInt g;
    CHECK(divide_content(IntMat(6, 4, 2, 8), &g) == IntMat(3, 2, 1, 4));
    CHECK(g == 2);
    IntMat V = identity_int();
    mul_into(V, M);
    mul_into(V, M);
    CHECK(V == M * M);
}

TEST_CASE("polynomial matrices") {
    std::vector<std::string> n = {"n"};
    PolyMat A(IntPolynomial(n), parse_poly("-n^6", n), IntPolynomial::constant(n, BigInt(1)), parse_poly("34*n^3+51*n^2+27*n+5", n));
    CHECK(poly_mat_det(A).str() == "n^6");
    CHECK(eval_int(A, {BigInt(1)}) == IntMat(0, -1, 1, 117));
    auto I = poly_mat_identity(n);
    CHECK(poly_mat_mul(I, A) == A);
    CHECK(poly_mat_content(PolyMat(parse_poly("6*n", n), parse_poly("4", n), parse_poly("2*n^2", n), parse_poly("8", n))) == 2);
}

TEST_CASE("high precision decimals") {
    HPDecimal third = HPDecimal::ratio(BigInt(1), BigInt(3), 60);
    CHECK(third.to_string(10) == "0.3333333333");
    HPDecimal two(60, 2L);
    CHECK(agreement_digits(two.sqrt() * two.sqrt(), two, 60) >= 58);
    CHECK(HPDecimal(40, BigRational(7, 2)).round() == 4);
    CHECK(HPDecimal(40, BigRational(-7, 2)).floor() == -4);
    CHECK(HPDecimal(40, std::string("1.25")).to_double() == doctest::Approx(1.25));
    CHECK(decimal_digits(BigInt(12345)) == 5);
    CHECK(agreement_digits(HPDecimal(50, std::string("3.14159")), HPDecimal(50, std::string("3.14160")), 50) >= 4);
    CHECK(agreement_digits(HPDecimal(50, std::string("3.14159")), HPDecimal(50, std::string("3.14160")), 50) <= 6);
}

TEST_CASE("rationals are canonical") {
    BigRational r(6, 4);
    r.canonicalize();
    CHECK(r == BigRational(3, 2));
    CHECK(r.get_den() == 2);
    CHECK(gcd(BigInt(12), BigInt(18)) == 6);
}
