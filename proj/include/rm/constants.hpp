#pragma once

#include <string>
#include <vector>

#include "rm/numeric.hpp"

namespace rm {

// Names: zeta2..zeta7, pi, e, ln2, catalan, phi, sqrt(k), cbrt(k).
HPDecimal get_constant(const std::string& name, long digits);
bool is_constant_name(const std::string& name);
std::vector<std::string> catalog_names();

// Computes the constant by its independent check series and returns the number of
// agreeing digits (capped at `digits`). Records the result in the manifest.
long verify_constant(const std::string& name, long digits);
std::string primary_series(const std::string& name);
std::string check_series(const std::string& name);
// {"name": {"series": id, "check": id, "verified_digits": k}, ...}
std::string catalog_manifest_json();

// Individual series, exposed for cross-checking.
HPDecimal pi_machin(long digits);
HPDecimal pi_agm(long digits);
HPDecimal e_factorial(long digits);
HPDecimal e_brothers(long digits);
HPDecimal ln2_atanh(long digits);
HPDecimal ln2_binary(long digits);
HPDecimal zeta_alternating(int s, long digits);
HPDecimal zeta_euler_maclaurin(int s, long digits);
HPDecimal catalan_alternating(long digits);
HPDecimal catalan_ramanujan(long digits);
std::vector<BigRational> bernoulli_even(long count);  // B_2, B_4, ..., B_{2 count}

// zhat(s,R) as exact rational coordinates over (1, zeta2, ..., zeta_s); index k holds the
// coefficient of zeta(k), index 0 the rational constant.
std::vector<BigRational> hat_zeta_symbolic(int s, long R);
HPDecimal hat_zeta(int s, long R, long digits);

// Sum_{n>=0} (-1)^n / (n+alpha)^s.
HPDecimal lerch_neg1(int s, const BigRational& alpha, long digits);

}  // namespace rm
