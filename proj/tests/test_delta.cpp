#include "doctest.h"

#include <cmath>

#include "rm/constants.hpp"
#include "rm/delta.hpp"
#include "rm/field.hpp"

using namespace rm;

namespace {

MatrixField identity_field() {
    MatrixField f;
    f.vars = {"x", "y"};
    f.mats = {poly_mat_identity(f.vars), poly_mat_identity(f.vars)};
    return f;
}

}  // namespace

TEST_CASE("closed form on the zeta3 diagonal") {
    auto r = delta_closed_form(catalog_field("zeta3"), diagonal(2));
    CHECK(r.method == "ClosedForm");
    CHECK(r.eig_max == "17+12*sqrt(2)");
    CHECK(r.eig_min == "17-12*sqrt(2)");
    CHECK(r.leading_matrix == std::vector<std::string>{"-1", "-6", "6", "35"});
    CHECK(r.trace_leading == "34");
    CHECK(r.det_leading == "1");
    CHECK(r.delta == doctest::Approx(0.080).epsilon(0.05));
    CHECK(r.ln_eigen_ratio == doctest::Approx(std::log((17 + 12 * std::sqrt(2.0)) / (17 - 12 * std::sqrt(2.0)))));
}

TEST_CASE("repeated eigenvalues are rejected") {
    try {
        delta_closed_form(identity_field(), diagonal(2));
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.code() == RM_ERR_DEFECTIVE_LIMIT);
    }
}

TEST_CASE("empirical delta on the zeta3 diagonal") {
    auto f = catalog_field("zeta3");
    auto r = delta_empirical(f, diagonal(2), field_target(f, diagonal(2), "zeta3"), 1000);
    CHECK(r.method == "Empirical");
    CHECK(std::fabs(r.delta - 0.080) <= 0.01);
    CHECK_FALSE(r.samples.empty());
}

TEST_CASE("delta of a plain rational sequence") {
    // p/q = 1/n against L = 0: error 1/q, so delta = 0
    std::vector<std::tuple<long, BigInt, BigInt>> seq;
    for (long n = 2; n <= 200; ++n) seq.emplace_back(n, BigInt(1), BigInt(n));
    auto r = delta_sequence(seq, fixed_target(HPDecimal(50, 0L)));
    CHECK(std::fabs(r.delta) < 1e-9);
    CHECK(delta_of(BigInt(1), BigInt(1000), fixed_target(HPDecimal(50, 0L))) == doctest::Approx(0.0));
    CHECK_THROWS_AS(delta_sequence({}, fixed_target(HPDecimal(50, 0L))), Error);
}

TEST_CASE("delta map") {
    auto f = catalog_field("zeta3");
    auto cells = delta_map(f, 2, 2, field_target(f, diagonal(2), "zeta3"));
    REQUIRE(cells.size() == 4);
    for (const auto& c : cells) CHECK(std::isfinite(c.delta));
    auto csv = delta_map_csv(cells);
    CHECK(csv.rfind("x,y,delta\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK_THROWS_AS(delta_map(f, 0, 3, fixed_target(HPDecimal(30, 0L))), Error);
}

TEST_CASE("trajectory optimizers") {
    SUBCASE("greedy does not move on a flat field") {
        auto r = optimize_greedy(identity_field(), fixed_target(HPDecimal(30, 1L)), 10);
        CHECK(r.path.empty());
    }
    SUBCASE("zeta2 optimum is the diagonal") {
        auto f = catalog_field("zeta2");
        auto L = field_target(f, diagonal(2), "zeta2");
        auto lls = optimize_lls(f, L, 30);
        CHECK(lls.direction == std::vector<long>{1, 1});
        auto greedy = optimize_greedy(f, L, 30);
        CHECK(greedy.direction == std::vector<long>{1, 1});
        CHECK(greedy.path.size() == 30);
    }
}

TEST_CASE("zeta combination coefficients") {
    auto c = combination_coefficients(5, {{4, 1}, {5, 1}});
    CHECK(c[5] == BigRational(1));
    CHECK(c[4] == BigRational(1));
    auto d = combination_coefficients(2, {{2, 0}});
    CHECK(d[2] == BigRational(1));
    CHECK(d[0] == BigRational(0));
    CHECK_THROWS_AS(combination_coefficients(5, {{2, 1}}), Error);
}

TEST_CASE("combined sequence reproduces zeta5") {
    auto plan = zeta_combination(5, {{2, 1}, {3, 1}, {4, 1}, {5, 1}}, 40, "lattice");
    CHECK(plan.check_digits >= 10);
    CHECK(plan.report.delta < 0);
    CHECK_THROWS_AS(zeta_combination(5, {{5, 1}}, 40, "sideways"), Error);
}
