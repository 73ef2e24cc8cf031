#include "doctest.h"

#include <fstream>
#include <map>

#include "rm/constants.hpp"
#include "rm/fr.hpp"

using namespace rm;

namespace {

HPDecimal hp(long d, long v) { return HPDecimal(d, v); }

std::map<std::string, std::string> fixture_digits() {
    std::map<std::string, std::string> out;
    std::ifstream in(RM_FIXTURE_DIR "/constants_1000.txt");
    std::string name, digits;
    while (in >> name >> digits) out[name] = digits;
    return out;
}

}  // namespace

TEST_CASE("algebraic and classical values") {
    auto phi = get_constant("phi", 60);
    CHECK(agreement_digits(phi, (hp(60, 1) + hp(60, 5).sqrt()) / hp(60, 2), 60) >= 50);
    auto pi = get_constant("pi", 200);
    CHECK(agreement_digits(get_constant("zeta2", 200), pi * pi / hp(200, 6), 200) >= 195);
    CHECK(agreement_digits(get_constant("zeta4", 120), pi * pi * pi * pi / hp(120, 90), 120) >= 115);
    CHECK(agreement_digits(get_constant("sqrt(3)", 50) * get_constant("sqrt(3)", 50), hp(50, 3), 50) >= 48);
    auto c = get_constant("cbrt(4)", 50);
    CHECK(agreement_digits(c * c * c, hp(50, 4), 50) >= 48);
}

TEST_CASE("independent series agree") {
    CHECK(agreement_digits(ln2_atanh(80), ln2_binary(80), 80) >= 75);
    CHECK(agreement_digits(pi_machin(80), pi_agm(80), 80) >= 75);
    CHECK(agreement_digits(e_factorial(80), e_brothers(80), 80) >= 75);
    CHECK(agreement_digits(zeta_alternating(3, 80), zeta_euler_maclaurin(3, 80), 80) >= 75);
    CHECK(agreement_digits(catalan_alternating(80), catalan_ramanujan(80), 80) >= 75);
    for (auto n : catalog_names()) {
        if (n.find("(k)") != std::string::npos) n.replace(n.find('k'), 1, "7");
        CAPTURE(n);
        CHECK(verify_constant(n, 100) >= 100);
    }
}

TEST_CASE("catalog against the 1000-digit fixtures") {
    auto fx = fixture_digits();
    REQUIRE(fx.size() >= 13);
    for (const auto& [name, digits] : fx) {
        CAPTURE(name);
        CHECK(agreement_digits(get_constant(name, 1010), HPDecimal(1010, digits), 1010) >= 998);
    }
}

TEST_CASE("unknown constants") {
    CHECK_FALSE(is_constant_name("zeta1"));
    CHECK(is_constant_name("sqrt(5)"));
    try {
        get_constant("gompertz", 20);
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.code() == RM_ERR_UNKNOWN_CONSTANT);
    }
}

TEST_CASE("Bernoulli numbers") {
    auto b = bernoulli_even(4);
    REQUIRE(b.size() == 4);
    CHECK(b[0] == BigRational(1, 6));
    CHECK(b[1] == BigRational(-1, 30));
    CHECK(b[2] == BigRational(1, 42));
    CHECK(b[3] == BigRational(-1, 30));
}

TEST_CASE("zeta-hat family") {
    const long D = 60;
    auto z = [&](const char* n) { return get_constant(n, D); };
    for (int s = 2; s <= 5; ++s) CHECK(agreement_digits(hat_zeta(s, 0, D), z(("zeta" + std::to_string(s)).c_str()), D) >= 55);
    CHECK(agreement_digits(hat_zeta(2, 1, D), z("zeta2") - hp(D, 1), D) >= 55);
    CHECK(agreement_digits(hat_zeta(5, 1, D), z("zeta5") - z("zeta4") + z("zeta3") - z("zeta2") + hp(D, 1), D) >= 55);
    auto sym = hat_zeta_symbolic(5, 1);
    // index k is the coefficient of zeta(k), index 0 the rational part
    REQUIRE(sym.size() == 6);
    CHECK(sym[0] == 1);
    CHECK(sym[1] == 0);
    CHECK(sym[2] == -1);
    CHECK(sym[3] == 1);
    CHECK(sym[4] == -1);
    CHECK(sym[5] == 1);
    for (int s = 3; s <= 5; ++s)
        for (long R = 1; R <= 4; ++R) {
            auto lhs = hat_zeta(s, R, D) + hat_zeta(s - 1, R, D) / hp(D, R);
            CHECK(agreement_digits(lhs, hat_zeta(s, R - 1, D), D) >= 55);
        }
}

TEST_CASE("Lerch values") {
    const long D = 50;
    CHECK(agreement_digits(lerch_neg1(2, 1, D), get_constant("zeta2", D) / hp(D, 2), D) >= 45);
    auto row1 = pcf_limit(Pcf::parse("n^2+(n+1)^2", "-n^4"), 20000, 30);
    auto inv_2phi = hp(D, 1) / (hp(D, 2) * lerch_neg1(2, 1, D));
    CHECK(agreement_digits(row1.value, inv_2phi, row1.digits) >= 30);
    auto row3 = pcf_limit(Pcf::parse("n^2+(n+1)^2+6", "-n^4"), 20000, 30);
    // 1/(2 Phi(-1,2,3)) = 2/(2 zeta2 - 3)
    CHECK(agreement_digits(row3.value, hp(D, 2) / (hp(D, 2) * get_constant("zeta2", D) - hp(D, 3)), row3.digits) >= 30);
    CHECK(agreement_digits(row3.value, hp(D, 1) / (hp(D, 2) * lerch_neg1(2, 3, D)), row3.digits) >= 30);
    CHECK(agreement_digits(lerch_neg1(1, 1, D), get_constant("ln2", D), D) >= 45);
}

TEST_CASE("manifest lists every catalog entry") {
    verify_constant("sqrt(7)", 30);
    auto m = catalog_manifest_json();
    for (const auto& n : catalog_names()) {
        if (n.find("(k)") != std::string::npos) continue;
        CHECK(m.find("\"" + n + "\"") != std::string::npos);
    }
    CHECK(m.find("\"sqrt(7)\"") != std::string::npos);
}
