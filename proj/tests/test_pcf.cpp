#include "doctest.h"

#include "rm/constants.hpp"
#include "rm/pcf.hpp"

using namespace rm;

namespace {

Pcf apery() { return Pcf::parse("34*n^3+51*n^2+27*n+5", "-n^6"); }
Pcf golden() { return Pcf::parse("1", "1"); }

}  // namespace

TEST_CASE("single step of the recursion") {
    auto s0 = initial_state(apery());
    CHECK(s0.depth == 0);
    CHECK(s0.p == 5);
    CHECK(s0.q == 1);
    auto s1 = step(s0, apery());
    CHECK(s1.depth == 1);
    CHECK(s1.p == 584);
    CHECK(s1.q == 117);
}

TEST_CASE("golden ratio convergents are Fibonacci ratios") {
    auto s = initial_state(golden());
    std::vector<std::pair<int, int>> want = {{2, 1}, {3, 2}, {5, 3}};
    for (auto [p, q] : want) {
        s = step(s, golden());
        CHECK(s.p == p);
        CHECK(s.q == q);
    }
    auto s2 = advance_to(golden(), 2);
    CHECK(s2.p_prev * s2.q - s2.p * s2.q_prev == 1);
}

TEST_CASE("matrix product reproduces the recursion") {
    auto mf = pcf_to_matrix(apery());
    CHECK(mf.initial == IntMat(1, 5, 0, 1));
    CHECK(eval_int(mf.step, {BigInt(1)}) == IntMat(0, -1, 1, 117));
    auto g = pcf_to_matrix(golden());
    for (long n = 1; n < 4; ++n) CHECK(eval_int(g.step, {BigInt(n)}) == IntMat(0, 1, 1, 1));
    IntMat V = mf.initial;
    for (long n = 1; n <= 30; ++n) {
        V = V * eval_int(mf.step, {BigInt(n)});
        auto s = advance_to(apery(), n);
        CHECK(V == IntMat(s.p_prev, s.p, s.q_prev, s.q));
    }
}

TEST_CASE("in-place stepping matches the functional form") {
    auto a = initial_state(apery());
    auto b = a;
    for (int i = 0; i < 20; ++i) {
        a = step(a, apery());
        step_in_place(b, apery());
    }
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    CHECK(a.depth == 20);
}

TEST_CASE("backoff schedule has proportional gaps") {
    auto s = backoff_schedule(500);
    REQUIRE(s.size() >= 3);
    CHECK(s[0] == 32);
    CHECK(s[1] == 48);
    CHECK(s[2] == 80);
    CHECK(s.back() == 500);
    for (size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
}

TEST_CASE("Apery limit") {
    auto r = pcf_limit(apery(), 500, 100);
    auto ref = HPDecimal(130, 6L) / get_constant("zeta3", 130);
    CHECK(r.digits >= 100);
    CHECK(agreement_digits(r.value, ref, 130) >= 100);
    CHECK_FALSE(r.terminated);
    for (size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i].second >= r.history[i - 1].second - 1);
}

TEST_CASE("72/(72 zeta2 - 115) limit") {
    auto r = pcf_limit(Pcf::parse("n^2+(n+1)^2+20", "-n^4"), 10000, 50);
    auto z2 = get_constant("zeta2", 80);
    auto ref = HPDecimal(80, 72L) / (HPDecimal(80, 72L) * z2 - HPDecimal(80, 115L));
    CHECK(r.digits >= 50);
    CHECK(agreement_digits(r.value, ref, 80) >= 50);
}

TEST_CASE("golden ratio limit") {
    auto r = pcf_limit(golden(), 1000, 60);
    CHECK(agreement_digits(r.value, get_constant("phi", 80), 80) >= 60);
}

TEST_CASE("terminating fraction returns the exact rational") {
    // b(2) = 0 cuts the fraction after a(0) + b(1)/a(1) = 1 - 1/3
    auto r = pcf_limit(Pcf::parse("2*n+1", "(n-2)"), 200, 20);
    CHECK(r.terminated);
    REQUIRE(r.exact);
    CHECK(*r.exact == BigRational(2, 3));
}

TEST_CASE("JSON forms") {
    CHECK(apery().json() == R"({"a":"34*n^3+51*n^2+27*n+5","b":"-n^6"})");
    auto r = pcf_limit(golden(), 200, 20);
    auto j = precision_report_json(r, 20);
    CHECK(j.find("\"digits\"") != std::string::npos);
    CHECK(j.find("1.6180339887") != std::string::npos);
}

TEST_CASE("b identically zero is rejected") {
    CHECK_THROWS_AS(Pcf::parse("n", "0"), Error);
}
