#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rm/numeric.hpp"
#include "rm/pcf.hpp"

namespace rm {

struct Relation {
    std::vector<BigInt> coefficients;
    HPDecimal residual{10};
    long input_digits = 0;  // K
    long coeff_digits = 0;  // l
    long confidence() const { return input_digits - coeff_digits; }
};

// Total decimal digits across the coefficients; zero coefficients count 0.
long coefficient_digits(const std::vector<BigInt>& c);

struct PslqOutcome {
    std::optional<Relation> relation;
    double norm_bound = 0;  // no relation with smaller Euclidean norm exists
    long iterations = 0;
};

PslqOutcome pslq(const std::vector<HPDecimal>& z, long max_coeff_digits, long tol_digits);

// gcd 1, first nonzero coefficient positive.
void normalize_relation(std::vector<BigInt>& c);

bool overfit_filter(const Relation& r, long margin = 10);

struct Match {
    Relation relation;
    std::vector<std::string> numerator_basis;  // "1", "zeta3", "zeta2*zeta3", ...
    bool validated_at_2x = false;
    std::string expression() const;  // v = (num)/(den)
    std::string json() const;
};

// Basis (1, eta, -v, -v*eta); v = (c0 + c1 eta) / (c2 + c3 eta). K = v.digits().
Match mobius_match(const HPDecimal& v, const std::string& constant, long max_coeff_digits = 20, long margin = 10);

// Basis (1, eta_1..eta_k [, products]) and its multiple by -v; at most 8 numerator terms.
Match extended_match(const HPDecimal& v, const std::vector<std::string>& constants, bool include_products,
                     long max_coeff_digits = 20, long margin = 10);

// Matches the Pcf limit at its certified precision, then again at twice the precision,
// and requires identical coefficients.
Match match_pcf(const Pcf& pcf, long max_depth, const std::vector<std::string>& constants, bool include_products,
                long margin = 10, long max_coeff_digits = 20);

// Value of (c0 + c1 eta + ...)/(d0 + d1 eta + ...) for a match, at the given precision.
HPDecimal evaluate_match(const Match& m, long digits);

}  // namespace rm
