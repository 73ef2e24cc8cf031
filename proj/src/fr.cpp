#include "rm/fr.hpp"

#include <cmath>

#include "json.hpp"

namespace rm {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::FactorialReduction: return "FactorialReduction";
        case Verdict::NoReduction: return "NoReduction";
        default: return "Inconclusive";
    }
}

Verdict verdict_from_name(const std::string& s) {
    if (s == "FactorialReduction") return Verdict::FactorialReduction;
    if (s == "NoReduction") return Verdict::NoReduction;
    if (s == "Inconclusive") return Verdict::Inconclusive;
    throw Error(RM_ERR_INVALID_ARGUMENT, "unknown verdict '" + s + "'");
}

Reduced reduce(const ConvergentState& s) {
    if (s.p == 0 && s.q == 0) throw Error(RM_ERR_ALL_ZERO, "both p and q are zero");
    Reduced r;
    r.g = gcd(s.p, s.q);
    mpz_divexact(r.p.get_mpz_t(), s.p.get_mpz_t(), r.g.get_mpz_t());
    mpz_divexact(r.q.get_mpz_t(), s.q.get_mpz_t(), r.g.get_mpz_t());
    return r;
}

GrowthEstimate classify_fr(const Pcf& pcf, long max_depth, bool use_q) {
    if (max_depth < 256) throw Error(RM_ERR_INVALID_ARGUMENT, "max_depth must be >= 256");
    GrowthEstimate out;
    out.depth = max_depth;
    std::vector<long> sched = backoff_schedule(max_depth);
    ConvergentState s = initial_state(pcf);
    std::vector<std::pair<long, double>> ell;
    BigInt bn;
    for (long d : sched) {
        while (s.depth < d) {
            pcf.b_at(s.depth + 1, bn);
            if (bn == 0) throw Error(RM_ERR_TERMINATED, "b(n) vanishes at n=" + std::to_string(s.depth + 1));
            step_in_place(s, pcf);
        }
        if (s.p == 0 && s.q == 0) continue;
        Reduced r = reduce(s);
        const BigInt& v = use_q ? r.q : r.p;
        if (v == 0) continue;
        double l = ln_abs(v);
        ell.emplace_back(d, l);
        out.samples.emplace_back(d, l / std::log(10.0));
    }
    if (ell.size() < 2) throw Error(RM_ERR_ALL_ZERO, "convergents vanish at the sample depths");
    size_t from = ell.size() / 2;
    double sxx = 0, sxn = 0, snn = 0, sxl = 0, snl = 0;
    for (size_t i = from; i < ell.size(); ++i) {
        double n = static_cast<double>(ell[i].first);
        double x = n * std::log(n) - n;
        double l = ell[i].second;
        sxx += x * x;
        sxn += x * n;
        snn += n * n;
        sxl += x * l;
        snl += n * l;
    }
    double det = sxx * snn - sxn * sxn;
    double d = det != 0 ? (sxl * snn - snl * sxn) / det : 0.0;
    double ls = det != 0 ? (sxx * snl - sxn * sxl) / det : snl / snn;
    out.dhat_raw = d;
    out.ln_s_free = ls;
    out.dhat = std::max(0.0, d);
    if (out.dhat < 0.1) {
        out.verdict = Verdict::FactorialReduction;
        out.ln_s = snl / snn;
    } else if (out.dhat > 0.5) {
        out.verdict = Verdict::NoReduction;
        out.ln_s = ls;
    } else {
        out.verdict = Verdict::Inconclusive;
        out.ln_s = ls;
    }
    return out;
}

std::string growth_json(const GrowthEstimate& g) {
    nlohmann::json j;
    j["ln_s"] = g.ln_s;
    j["dhat"] = g.dhat;
    j["dhat_raw"] = g.dhat_raw;
    j["ln_s_free"] = g.ln_s_free;
    j["verdict"] = verdict_name(g.verdict);
    j["depth"] = g.depth;
    nlohmann::json s = nlohmann::json::array();
    for (auto& [d, v] : g.samples) s.push_back({d, v});
    j["samples"] = s;
    return j.dump();
}

}  // namespace rm
