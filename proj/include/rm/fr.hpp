#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rm/pcf.hpp"

namespace rm {

enum class Verdict { FactorialReduction, NoReduction, Inconclusive };

const char* verdict_name(Verdict v);
Verdict verdict_from_name(const std::string& s);

struct GrowthEstimate {
    double ln_s = 0;
    double dhat = 0;      // clamped at 0
    double dhat_raw = 0;  // unconstrained fit
    double ln_s_free = 0; // ln_s of the two-parameter fit
    std::vector<std::pair<long, double>> samples;  // (depth, decimal digits of |p/g|)
    Verdict verdict = Verdict::Inconclusive;
    long depth = 0;
};

struct Reduced {
    BigInt g, p, q;
};

Reduced reduce(const ConvergentState& s);

// `use_q` fits the reduced denominators instead of the numerators.
GrowthEstimate classify_fr(const Pcf& pcf, long max_depth, bool use_q = false);

std::string growth_json(const GrowthEstimate& g);

}  // namespace rm
