#include "rm/pcf.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace rm {

namespace {

IntPolynomial as_n(const IntPolynomial& p) {
    IntPolynomial r({"n"});
    for (const auto& [e, c] : p.terms()) r.add_term(Exponents{e.empty() ? uint16_t(0) : e[0]}, c);
    return r;
}

}  // namespace

Pcf::Pcf(IntPolynomial a, IntPolynomial b) {
    if (a.nvars() > 1 || b.nvars() > 1) throw Error(RM_ERR_ARITY, "pcf polynomials must be univariate");
    a_ = as_n(a);
    b_ = as_n(b);
    if (b_.is_zero()) throw Error(RM_ERR_INVALID_ARGUMENT, "b must not be identically zero");
    da_ = dense_coeffs(a_);
    db_ = dense_coeffs(b_);
}

Pcf Pcf::parse(const std::string& a, const std::string& b) {
    return Pcf(parse_poly(a, {"n"}), parse_poly(b, {"n"}));
}

std::string Pcf::json() const {
    nlohmann::json j;
    j["a"] = a_.str();
    j["b"] = b_.str();
    return j.dump();
}

ConvergentState initial_state(const Pcf& pcf) {
    ConvergentState s;
    s.depth = 0;
    s.p_prev = 1;
    s.p = pcf.a_at(0);
    s.q_prev = 0;
    s.q = 1;
    return s;
}

void step_in_place(ConvergentState& s, const Pcf& pcf) {
    thread_local BigInt an, bn, t;
    long n = s.depth + 1;
    pcf.a_at(n, an);
    pcf.b_at(n, bn);
    t = an * s.p + bn * s.p_prev;
    s.p_prev.swap(s.p);
    s.p.swap(t);
    t = an * s.q + bn * s.q_prev;
    s.q_prev.swap(s.q);
    s.q.swap(t);
    s.depth = n;
}

ConvergentState step(const ConvergentState& s, const Pcf& pcf) {
    ConvergentState r = s;
    step_in_place(r, pcf);
    return r;
}

ConvergentState advance_to(const Pcf& pcf, long depth) {
    ConvergentState s = initial_state(pcf);
    while (s.depth < depth) step_in_place(s, pcf);
    return s;
}

std::vector<long> backoff_schedule(long max_depth, bool include_end, long n0, long c) {
    std::vector<long> out;
    long n = n0;
    for (long l = 0; n <= max_depth; ++l) {
        out.push_back(n);
        n += c * (l + 1);
    }
    if (include_end && (out.empty() || out.back() != max_depth) && max_depth > 0) out.push_back(max_depth);
    return out;
}

HPDecimal richardson(const std::vector<HPDecimal>& s, long N, long m, long digits) {
    // S = (1/m!) sum_k (-1)^(k+m) C(m,k) (N+k)^m S_{N+k}
    HPDecimal acc(digits);
    BigInt binom = 1;
    for (long k = 0; k <= m; ++k) {
        if (k > 0) {
            binom *= (m - k + 1);
            binom /= k;
        }
        BigInt w;
        mpz_ui_pow_ui(w.get_mpz_t(), static_cast<unsigned long>(N + k), static_cast<unsigned long>(m));
        w *= binom;
        if ((k + m) % 2) w = -w;
        acc += HPDecimal(digits, w) * s[static_cast<size_t>(k)];
    }
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(m));
    return acc / HPDecimal(digits, f);
}

namespace {

// Runs the recursion to `end` and returns the ratios at end-m..end.
std::vector<HPDecimal> tail_ratios(const Pcf& pcf, long N, long m, long digits) {
    std::vector<HPDecimal> out;
    ConvergentState s = initial_state(pcf);
    while (s.depth < N) step_in_place(s, pcf);
    for (long k = 0; k <= m; ++k) {
        if (k > 0) step_in_place(s, pcf);
        if (s.q == 0) throw Error(RM_ERR_ZERO_DENOMINATOR, "zero denominator inside extrapolation window");
        out.push_back(HPDecimal::ratio(s.p, s.q, digits));
    }
    return out;
}

struct Extrapolated {
    HPDecimal value{10};
    long digits = -1;
    long depth = 0;
};

Extrapolated try_richardson(const Pcf& pcf, long max_depth, long target, long margin, long order) {
    Extrapolated best;
    long m = order > 0 ? order : std::clamp<long>(max_depth / 8, 4, 60);
    if (max_depth < 4 * m) m = std::max<long>(2, max_depth / 4);
    long N1 = max_depth - m;
    long N2 = N1 / 2;
    if (N2 < 2) return best;
    long extra = static_cast<long>(std::ceil(m * std::log10(static_cast<double>(max_depth) + 1.0)));
    long digits = target + margin + extra + 30;
    // One pass covers both windows because N2 + m <= N1.
    std::vector<HPDecimal> w1 = tail_ratios(pcf, N1, m, digits);
    std::vector<HPDecimal> w2 = tail_ratios(pcf, N2, m, digits);
    HPDecimal r1 = richardson(w1, N1, m, digits);
    HPDecimal r2 = richardson(w2, N2, m, digits);
    best.value = r1.with_digits(target + margin + 20);
    best.digits = shared_digits(r1, r2, target + margin + 20);
    best.depth = max_depth;
    return best;
}

}  // namespace

PrecisionReport pcf_limit(const Pcf& pcf, long max_depth, long target_digits, const LimitOptions& opt) {
    if (max_depth < 2) throw Error(RM_ERR_INVALID_ARGUMENT, "max_depth must be >= 2");
    long work = opt.working_digits > 0 ? opt.working_digits : target_digits + opt.margin + 20;
    long cap = work - 5;
    PrecisionReport rep;
    rep.value = HPDecimal(work);
    std::vector<long> sched = backoff_schedule(max_depth);
    ConvergentState s = initial_state(pcf);
    std::optional<HPDecimal> prev;
    long skipped = 0;
    bool have = false;
    BigInt bn;
    for (long target_depth : sched) {
        while (s.depth < target_depth) {
            pcf.b_at(s.depth + 1, bn);
            if (bn == 0) {
                rep.terminated = true;
                if (s.q == 0) throw Error(RM_ERR_ZERO_DENOMINATOR, "terminated fraction with zero denominator");
                BigRational ex(s.p, s.q);
                ex.canonicalize();
                rep.exact = ex;
                rep.value = HPDecimal(work, ex);
                rep.depth = s.depth;
                rep.digits = cap;
                rep.method = "exact";
                return rep;
            }
            step_in_place(s, pcf);
        }
        if (s.q == 0) {
            ++skipped;
            continue;
        }
        HPDecimal v = HPDecimal::ratio(s.p, s.q, work);
        long k = prev ? shared_digits(*prev, v, cap) : -1;
        rep.history.emplace_back(s.depth, k);
        rep.value = v;
        rep.depth = s.depth;
        rep.digits = k;
        have = true;
        prev = v;
        if (k >= target_digits + opt.margin) break;
    }
    if (!have) throw Error(RM_ERR_ZERO_DENOMINATOR, "denominator vanished at every sample");
    bool want = opt.accel == Accel::Richardson ||
                (opt.accel == Accel::Auto && rep.digits < target_digits + opt.margin);
    if (want) {
        Extrapolated ex = try_richardson(pcf, max_depth, target_digits, opt.margin, opt.richardson_order);
        if (ex.digits > rep.digits) {
            rep.value = ex.value;
            rep.digits = ex.digits;
            rep.depth = ex.depth;
            rep.method = "richardson";
        }
    }
    if (rep.digits < 0) throw Error(RM_ERR_DIVERGENCE, "no shared digits between the deepest samples");
    return rep;
}

MatrixForm pcf_to_matrix(const Pcf& pcf) {
    MatrixForm f;
    f.initial = IntMat(1, pcf.a_at(0), 0, 1);
    std::vector<std::string> v{"n"};
    f.step = PolyMat(IntPolynomial(v), pcf.b(), IntPolynomial::constant(v, 1), pcf.a());
    return f;
}

std::string precision_report_json(const PrecisionReport& r, long print_digits) {
    nlohmann::json j;
    long shown = std::max<long>(0, std::min(print_digits, r.value.digits()));
    j["value"] = r.value.to_string(shown);
    j["digits"] = r.digits;
    j["depth"] = r.depth;
    j["method"] = r.method;
    j["terminated"] = r.terminated;
    if (r.exact) j["exact"] = r.exact->get_str();
    nlohmann::json h = nlohmann::json::array();
    for (auto& [d, k] : r.history) h.push_back({d, k});
    j["history"] = h;
    return j.dump();
}

}  // namespace rm
