#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "rm/fr.hpp"

using namespace rm;

TEST_CASE("gcd reduction") {
    ConvergentState s;
    s.p = 6;
    s.q = 4;
    auto r = reduce(s);
    CHECK(r.g == 2);
    CHECK(r.p == 3);
    CHECK(r.q == 2);
    s.p = 5;
    s.q = 1;
    CHECK(reduce(s).g == 1);
    auto golden = Pcf::parse("1", "1");
    for (long d : {3L, 17L, 90L}) CHECK(reduce(advance_to(golden, d)).g == 1);
}

TEST_CASE("reduction is lossless") {
    auto p = Pcf::parse("n^2+(n+1)^2+20", "-n^4");
    for (long d : {10L, 64L, 200L}) {
        auto s = advance_to(p, d);
        auto r = reduce(s);
        CHECK(r.g * r.p == s.p);
        CHECK(r.g * r.q == s.q);
    }
}

TEST_CASE("Apery shows factorial reduction") {
    auto g = classify_fr(Pcf::parse("34*n^3+51*n^2+27*n+5", "-n^6"), 4096);
    CHECK(g.verdict == Verdict::FactorialReduction);
    CHECK(g.ln_s == doctest::Approx(6.53).epsilon(0.1 / 6.53));
    CHECK(g.dhat >= 0);
    CHECK(g.depth == 4096);
    CHECK(growth_json(g).find("\"verdict\":\"FactorialReduction\"") != std::string::npos);
}

TEST_CASE("perturbed Apery coefficients do not reduce") {
    for (auto a : {"17*(n^3+(n+1)^3)-11*(2*n+1)", "17*(n^3+(n+1)^3)-13*(2*n+1)", "16*(n^3+(n+1)^3)-12*(2*n+1)",
                   "18*(n^3+(n+1)^3)-12*(2*n+1)"}) {
        CAPTURE(a);
        CHECK(classify_fr(Pcf::parse(a, "-n^6"), 1024).verdict == Verdict::NoReduction);
    }
}

TEST_CASE("historical formulas all reduce, p and q agree") {
    for (const auto& f : rm_test::fr_corpus()) {
        CAPTURE(f.label);
        auto pcf = Pcf::parse(f.a, f.b);
        auto gp = classify_fr(pcf, 1024);
        auto gq = classify_fr(pcf, 1024, true);
        CHECK(gp.verdict == Verdict::FactorialReduction);
        CHECK(gq.verdict == gp.verdict);
        CHECK(std::fabs(gp.ln_s - gq.ln_s) < 0.05);
    }
}

TEST_CASE("verdict names round-trip") {
    for (auto v : {Verdict::FactorialReduction, Verdict::NoReduction, Verdict::Inconclusive})
        CHECK(verdict_from_name(verdict_name(v)) == v);
}

TEST_CASE("FR preconditions") {
    CHECK_THROWS_AS(classify_fr(Pcf::parse("n", "-1"), 100), Error);
    CHECK_THROWS_AS(classify_fr(Pcf::parse("2*n+1", "n-3"), 512), Error);
}
