#include "doctest.h"

#include "rm/constants.hpp"
#include "rm/relation.hpp"

using namespace rm;

namespace {

HPDecimal hp(long d, long v) { return HPDecimal(d, v); }

bool is(const std::vector<BigInt>& c, std::vector<long> want) {
    if (c.size() != want.size()) return false;
    for (size_t i = 0; i < c.size(); ++i)
        if (c[i] != want[i]) return false;
    return true;
}

bool up_to_sign(const std::vector<BigInt>& c, std::vector<long> want) {
    if (is(c, want)) return true;
    for (auto& w : want) w = -w;
    return is(c, want);
}

}  // namespace

TEST_CASE("PSLQ on small vectors") {
    auto phi = get_constant("phi", 60);
    auto r = pslq({hp(60, 1), phi, phi * phi}, 20, 50);
    REQUIRE(r.relation);
    CHECK(up_to_sign(r.relation->coefficients, {1, 1, -1}));
    auto h = pslq({hp(60, 1), hp(60, 1) / hp(60, 2)}, 20, 50);
    REQUIRE(h.relation);
    CHECK(up_to_sign(h.relation->coefficients, {1, -2}));
}

TEST_CASE("PSLQ recovers the Apery relation") {
    auto z3 = get_constant("zeta3", 100);
    auto v = pcf_limit(Pcf::parse("34*n^3+51*n^2+27*n+5", "-n^6"), 500, 90).value.with_digits(100);
    auto r = pslq({hp(100, 1), z3, -v, -(v * z3)}, 20, 80);
    REQUIRE(r.relation);
    CHECK(up_to_sign(r.relation->coefficients, {6, 0, 0, 1}));
}

TEST_CASE("PSLQ bounds the norm when nothing is found") {
    auto out = pslq({hp(60, 1), get_constant("pi", 60), get_constant("e", 60)}, 5, 50);
    CHECK_FALSE(out.relation);
    CHECK(out.norm_bound > 1);
}

TEST_CASE("precision below the tolerance is refused") {
    try {
        pslq({hp(30, 1), get_constant("pi", 30)}, 10, 60);
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.code() == RM_ERR_PRECISION_TOO_LOW);
    }
}

TEST_CASE("Mobius matching") {
    auto z2 = get_constant("zeta2", 100);
    auto v = hp(100, 72) / (hp(100, 72) * z2 - hp(100, 115));
    auto m = mobius_match(v, "zeta2");
    CHECK(is(m.relation.coefficients, {72, 0, -115, 72}));
    CHECK(m.relation.confidence() >= 10);
    CHECK(m.expression().find("zeta2") != std::string::npos);
    CHECK(agreement_digits(evaluate_match(m, 100), v, 100) >= 90);

    CHECK(is(mobius_match(z2, "zeta2").relation.coefficients, {0, 1, 1, 0}));
    auto z3 = get_constant("zeta3", 100);
    CHECK(is(mobius_match(hp(100, 6) / z3, "zeta3").relation.coefficients, {6, 0, 0, 1}));
}

TEST_CASE("Mobius matching is deterministic") {
    auto v = hp(80, 3) / (hp(80, 2) + get_constant("pi", 80));
    auto a = mobius_match(v, "pi").relation.coefficients;
    auto b = mobius_match(v, "pi").relation.coefficients;
    CHECK(a == b);
}

TEST_CASE("Mobius mismatch") {
    try {
        mobius_match(get_constant("pi", 40), "e");
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK((e.code() == RM_ERR_NO_MATCH || e.code() == RM_ERR_LOW_CONFIDENCE));
    }
}

TEST_CASE("extended matching") {
    const long D = 80;
    auto z = [&](const char* n) { return get_constant(n, D); };
    auto v = hp(D, 1) / (z("zeta3") - z("zeta2") + hp(D, 1));
    auto m = extended_match(v, {"zeta3", "zeta2"}, false);
    CHECK(agreement_digits(evaluate_match(m, D), v, D) >= 70);
    CHECK(m.relation.confidence() >= 10);

    auto w = hp(D, 1) / (z("zeta5") - z("zeta4") + z("zeta3") - z("zeta2") + hp(D, 1));
    auto m5 = extended_match(w, {"zeta5", "zeta4", "zeta3", "zeta2"}, false);
    CHECK(agreement_digits(evaluate_match(m5, D), w, D) >= 70);

    auto two = extended_match(hp(50, 2), {"pi"}, false);
    CHECK(agreement_digits(evaluate_match(two, 50), hp(50, 2), 50) >= 45);
    CHECK(two.relation.coeff_digits <= 2);
}

TEST_CASE("overfit filter") {
    Relation r;
    r.input_digits = 100;
    r.coeff_digits = 7;
    CHECK(overfit_filter(r));
    r.input_digits = 6;
    r.coeff_digits = 6;
    CHECK_FALSE(overfit_filter(r));
    r.input_digits = 20;
    r.coeff_digits = 10;
    CHECK(overfit_filter(r, 10));
    CHECK_FALSE(overfit_filter(r, 11));
}

TEST_CASE("coefficient digits and normalization") {
    CHECK(coefficient_digits({BigInt(72), BigInt(0), BigInt(-115), BigInt(72)}) == 7);
    std::vector<BigInt> c = {BigInt(0), BigInt(-4), BigInt(2), BigInt(6)};
    normalize_relation(c);
    CHECK(is(c, {0, 2, -1, -3}));
}

TEST_CASE("match straight from a Pcf") {
    auto m = match_pcf(Pcf::parse("34*n^3+51*n^2+27*n+5", "-n^6"), 300, {"zeta3"}, false);
    CHECK(is(m.relation.coefficients, {6, 0, 0, 1}));
    CHECK(m.json().find("\"confidence\"") != std::string::npos);
}
