#include "rm/constants.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <regex>

#include "json.hpp"
#include "rm/error.hpp"

namespace rm {

namespace {

constexpr long kGuard = 20;
constexpr long kMaxDigits = 200000;

long terms_for(long digits, double digits_per_term) {
    return static_cast<long>(std::ceil(static_cast<double>(digits) / digits_per_term)) + 10;
}

// arctan(1/k) = sum (-1)^j / ((2j+1) k^(2j+1))
HPDecimal atan_inv(unsigned long k, long digits) {
    HPDecimal sum(digits), pw(digits, 1), term(digits);
    mpfr_div_ui(pw.raw(), pw.raw(), k, MPFR_RNDN);
    unsigned long k2 = k * k;
    long n = terms_for(digits, 2 * std::log10(static_cast<double>(k)));
    for (long j = 0; j < n; ++j) {
        mpfr_div_ui(term.raw(), pw.raw(), static_cast<unsigned long>(2 * j + 1), MPFR_RNDN);
        if (j % 2) mpfr_sub(sum.raw(), sum.raw(), term.raw(), MPFR_RNDN);
        else mpfr_add(sum.raw(), sum.raw(), term.raw(), MPFR_RNDN);
        mpfr_div_ui(pw.raw(), pw.raw(), k2, MPFR_RNDN);
    }
    return sum;
}

// atanh(1/k) = sum 1 / ((2j+1) k^(2j+1))
HPDecimal atanh_inv(unsigned long k, long digits) {
    HPDecimal sum(digits), pw(digits, 1), term(digits);
    mpfr_div_ui(pw.raw(), pw.raw(), k, MPFR_RNDN);
    long n = terms_for(digits, 2 * std::log10(static_cast<double>(k)));
    for (long j = 0; j < n; ++j) {
        mpfr_div_ui(term.raw(), pw.raw(), static_cast<unsigned long>(2 * j + 1), MPFR_RNDN);
        mpfr_add(sum.raw(), sum.raw(), term.raw(), MPFR_RNDN);
        mpfr_div_ui(pw.raw(), pw.raw(), k * k, MPFR_RNDN);
    }
    return sum;
}

// Cohen-Rodriguez Villegas-Zagier acceleration of sum_{k>=0} (-1)^k a(k).
HPDecimal alternating_sum(const std::function<void(long, HPDecimal&)>& a, long digits) {
    long w = digits + kGuard;
    long n = static_cast<long>(std::ceil(w * std::log(10.0) / std::log(3.0 + std::sqrt(8.0)))) + 5;
    HPDecimal d(w, 8);
    mpfr_sqrt(d.raw(), d.raw(), MPFR_RNDN);
    mpfr_add_ui(d.raw(), d.raw(), 3, MPFR_RNDN);
    mpfr_pow_ui(d.raw(), d.raw(), static_cast<unsigned long>(n), MPFR_RNDN);
    HPDecimal inv = HPDecimal(w, 1) / d;
    d = (d + inv) / HPDecimal(w, 2);
    HPDecimal b(w, -1), c = -d, s(w), ak(w);
    for (long k = 0; k < n; ++k) {
        c = b - c;
        a(k, ak);
        s += c * ak;
        // b <- b (k+n)(k-n) / ((k+1/2)(k+1)) = b * 2(k+n)(k-n) / ((2k+1)(k+1))
        mpfr_mul_si(b.raw(), b.raw(), 2 * (k + n), MPFR_RNDN);
        mpfr_mul_si(b.raw(), b.raw(), k - n, MPFR_RNDN);
        mpfr_div_ui(b.raw(), b.raw(), static_cast<unsigned long>(2 * k + 1), MPFR_RNDN);
        mpfr_div_ui(b.raw(), b.raw(), static_cast<unsigned long>(k + 1), MPFR_RNDN);
    }
    return (s / d).with_digits(digits);
}

struct Entry {
    std::string primary;
    std::string check;
    std::function<HPDecimal(long)> compute;
    std::function<HPDecimal(long)> verify;
};

bool parse_root(const std::string& name, std::string& kind, unsigned long& k) {
    static const std::regex re(R"((sqrt|cbrt)\((\d{1,9})\))");
    std::smatch m;
    if (!std::regex_match(name, m, re)) return false;
    kind = m[1];
    k = std::stoul(m[2]);
    return true;
}

HPDecimal newton_root(unsigned long k, int r, long digits) {
    long w = digits + kGuard;
    HPDecimal x(w, std::pow(static_cast<double>(k), 1.0 / r) > 0 ? 1 : 1);
    mpfr_set_d(x.raw(), std::pow(static_cast<double>(k), 1.0 / r), MPFR_RNDN);
    HPDecimal K(w, static_cast<long>(k));
    int iters = static_cast<int>(std::ceil(std::log2(w / 14.0 + 1))) + 3;
    for (int i = 0; i < iters; ++i) {
        if (r == 2) {
            x = (x + K / x) / HPDecimal(w, 2);
        } else {
            x = (HPDecimal(w, 2) * x + K / (x * x)) / HPDecimal(w, 3);
        }
    }
    return x.with_digits(digits);
}

Entry entry_for(const std::string& name) {
    if (name == "pi") return {"machin", "gauss-legendre-agm", pi_machin, pi_agm};
    if (name == "e") return {"factorial-series", "brothers-series", e_factorial, e_brothers};
    if (name == "ln2") return {"atanh(1/3)", "sum 1/(k 2^k)", ln2_atanh, ln2_binary};
    if (name == "catalan") return {"alternating-accelerated", "ramanujan-log-series", catalan_alternating, catalan_ramanujan};
    if (name == "phi")
        return {"mpfr-sqrt", "newton",
                [](long d) {
                    HPDecimal x(d + kGuard, 5);
                    x = (x.sqrt() + HPDecimal(d + kGuard, 1)) / HPDecimal(d + kGuard, 2);
                    return x.with_digits(d);
                },
                [](long d) {
                    HPDecimal s = newton_root(5, 2, d + kGuard);
                    return ((s + HPDecimal(d + kGuard, 1)) / HPDecimal(d + kGuard, 2)).with_digits(d);
                }};
    if (name.size() == 5 && name.rfind("zeta", 0) == 0 && name[4] >= '2' && name[4] <= '7') {
        int s = name[4] - '0';
        return {"eta-alternating", "euler-maclaurin", [s](long d) { return zeta_alternating(s, d); },
                [s](long d) { return zeta_euler_maclaurin(s, d); }};
    }
    std::string kind;
    unsigned long k = 0;
    if (parse_root(name, kind, k)) {
        int r = kind == "sqrt" ? 2 : 3;
        return {"mpfr-" + kind, "newton",
                [k, r](long d) {
                    HPDecimal x(d + kGuard, static_cast<long>(k));
                    if (r == 2) mpfr_sqrt(x.raw(), x.raw(), MPFR_RNDN);
                    else mpfr_cbrt(x.raw(), x.raw(), MPFR_RNDN);
                    return x.with_digits(d);
                },
                [k, r](long d) { return newton_root(k, r, d); }};
    }
    throw Error(RM_ERR_UNKNOWN_CONSTANT, "unknown constant '" + name + "'");
}

struct Cache {
    std::mutex mu;
    std::map<std::string, HPDecimal> values;
    std::map<std::string, long> verified;
};

Cache& cache() {
    static Cache c;
    return c;
}

}  // namespace

bool is_constant_name(const std::string& name) {
    try {
        entry_for(name);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::vector<std::string> catalog_names() {
    return {"zeta2", "zeta3", "zeta4", "zeta5", "zeta6", "zeta7", "pi", "e", "ln2", "catalan", "phi", "sqrt(k)", "cbrt(k)"};
}

std::string primary_series(const std::string& name) { return entry_for(name).primary; }
std::string check_series(const std::string& name) { return entry_for(name).check; }

HPDecimal get_constant(const std::string& name, long digits) {
    if (digits < 1) throw Error(RM_ERR_INVALID_ARGUMENT, "digits must be positive");
    if (digits > kMaxDigits) throw Error(RM_ERR_PRECISION_UNACHIEVABLE, "requested precision exceeds the catalog limit");
    Entry e = entry_for(name);
    Cache& c = cache();
    {
        std::lock_guard<std::mutex> lock(c.mu);
        auto it = c.values.find(name);
        if (it != c.values.end() && it->second.digits() >= digits) return it->second.with_digits(digits);
    }
    // Computed outside the lock; the single writer below keeps the most precise value.
    HPDecimal v = e.compute(digits);
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.values.find(name);
    if (it == c.values.end() || it->second.digits() < v.digits()) c.values.insert_or_assign(name, v);
    return v.with_digits(digits);
}

long verify_constant(const std::string& name, long digits) {
    Entry e = entry_for(name);
    HPDecimal a = get_constant(name, digits + 10);
    HPDecimal b = e.verify(digits + 10);
    long k = agreement_digits(a, b, digits);
    Cache& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    long& v = c.verified[name];
    v = std::max(v, k);
    return k;
}

std::string catalog_manifest_json() {
    nlohmann::json j = nlohmann::json::object();
    Cache& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    for (const char* n : {"zeta2", "zeta3", "zeta4", "zeta5", "zeta6", "zeta7", "pi", "e", "ln2", "catalan", "phi"}) {
        Entry e = entry_for(n);
        auto it = c.verified.find(n);
        j[n] = {{"series", e.primary}, {"check", e.check}, {"verified_digits", it == c.verified.end() ? 0 : it->second}};
    }
    for (auto& [n, k] : c.verified) {
        if (j.contains(n)) continue;
        Entry e = entry_for(n);
        j[n] = {{"series", e.primary}, {"check", e.check}, {"verified_digits", k}};
    }
    return j.dump();
}

HPDecimal pi_machin(long digits) {
    long w = digits + kGuard;
    HPDecimal a = atan_inv(5, w), b = atan_inv(239, w);
    return (HPDecimal(w, 16) * a - HPDecimal(w, 4) * b).with_digits(digits);
}

HPDecimal pi_agm(long digits) {
    long w = digits + kGuard;
    HPDecimal a(w, 1), b(w, 2), t(w, 1), p(w, 1);
    b = HPDecimal(w, 1) / b.sqrt();
    mpfr_div_ui(t.raw(), t.raw(), 4, MPFR_RNDN);
    int iters = static_cast<int>(std::ceil(std::log2(static_cast<double>(w)))) + 3;
    for (int i = 0; i < iters; ++i) {
        HPDecimal an = (a + b) / HPDecimal(w, 2);
        HPDecimal bn = (a * b).sqrt();
        HPDecimal d = a - an;
        t -= p * d * d;
        p = p * HPDecimal(w, 2);
        a = an;
        b = bn;
    }
    HPDecimal s = a + b;
    return (s * s / (HPDecimal(w, 4) * t)).with_digits(digits);
}

HPDecimal e_factorial(long digits) {
    long w = digits + kGuard;
    HPDecimal sum(w, 1), term(w, 1);
    for (unsigned long k = 1;; ++k) {
        mpfr_div_ui(term.raw(), term.raw(), k, MPFR_RNDN);
        sum += term;
        if (term.log10_abs() < -w - 2) break;
    }
    return sum.with_digits(digits);
}

HPDecimal e_brothers(long digits) {
    // e = sum (2k+2)/(2k+1)!
    long w = digits + kGuard;
    HPDecimal sum(w), inv_fact(w, 1), t(w);
    for (unsigned long k = 0;; ++k) {
        if (k > 0) {
            mpfr_div_ui(inv_fact.raw(), inv_fact.raw(), 2 * k, MPFR_RNDN);
            mpfr_div_ui(inv_fact.raw(), inv_fact.raw(), 2 * k + 1, MPFR_RNDN);
        }
        mpfr_mul_ui(t.raw(), inv_fact.raw(), 2 * k + 2, MPFR_RNDN);
        sum += t;
        if (t.log10_abs() < -w - 2) break;
    }
    return sum.with_digits(digits);
}

HPDecimal ln2_atanh(long digits) {
    long w = digits + kGuard;
    return (HPDecimal(w, 2) * atanh_inv(3, w)).with_digits(digits);
}

HPDecimal ln2_binary(long digits) {
    long w = digits + kGuard;
    HPDecimal sum(w), pw(w, 1), t(w);
    for (unsigned long k = 1;; ++k) {
        mpfr_div_ui(pw.raw(), pw.raw(), 2, MPFR_RNDN);
        mpfr_div_ui(t.raw(), pw.raw(), k, MPFR_RNDN);
        sum += t;
        if (t.log10_abs() < -w - 2) break;
    }
    return sum.with_digits(digits);
}

HPDecimal zeta_alternating(int s, long digits) {
    if (s < 2) throw Error(RM_ERR_UNKNOWN_CONSTANT, "zeta(s) needs s >= 2");
    long w = digits + kGuard;
    BigInt pw;
    HPDecimal eta = alternating_sum(
        [&](long k, HPDecimal& out) {
            mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(k + 1), static_cast<unsigned long>(s));
            mpfr_set_ui(out.raw(), 1, MPFR_RNDN);
            mpfr_div_z(out.raw(), out.raw(), pw.get_mpz_t(), MPFR_RNDN);
        },
        w);
    // zeta = eta / (1 - 2^(1-s))
    HPDecimal f(w, 1);
    mpfr_div_2ui(f.raw(), f.raw(), static_cast<unsigned long>(s - 1), MPFR_RNDN);
    f = HPDecimal(w, 1) - f;
    return (eta / f).with_digits(digits);
}

std::vector<BigRational> bernoulli_even(long count) {
    // Tangent numbers T_1..T_count, then B_2k = (-1)^(k-1) 2k T_k / (2^(2k) (2^(2k) - 1)).
    std::vector<BigInt> T(static_cast<size_t>(count) + 1, BigInt(0));
    if (count >= 1) T[1] = 1;
    for (long k = 2; k <= count; ++k) T[k] = (k - 1) * T[k - 1];
    for (long k = 2; k <= count; ++k)
        for (long j = k; j <= count; ++j) T[j] = (j - k) * T[j - 1] + (j - k + 2) * T[j];
    std::vector<BigRational> out;
    for (long k = 1; k <= count; ++k) {
        BigInt p2;
        mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(2 * k));
        BigRational b(BigInt(2 * k) * T[k], p2 * (p2 - 1));
        b.canonicalize();
        if ((k - 1) % 2) b = -b;
        out.push_back(b);
    }
    return out;
}

HPDecimal zeta_euler_maclaurin(int s, long digits) {
    if (s < 2) throw Error(RM_ERR_UNKNOWN_CONSTANT, "zeta(s) needs s >= 2");
    long w = digits + kGuard;
    long N = std::max<long>(10, w / 2);
    HPDecimal sum(w);
    BigInt pw;
    HPDecimal t(w);
    for (long k = 1; k < N; ++k) {
        mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(s));
        mpfr_set_ui(t.raw(), 1, MPFR_RNDN);
        mpfr_div_z(t.raw(), t.raw(), pw.get_mpz_t(), MPFR_RNDN);
        sum += t;
    }
    HPDecimal n(w, N);
    HPDecimal ns(w, N);  // N^s
    mpfr_pow_ui(ns.raw(), n.raw(), static_cast<unsigned long>(s), MPFR_RNDN);
    sum += n / (ns * HPDecimal(w, s - 1));
    sum += HPDecimal(w, 1) / (HPDecimal(w, 2) * ns);
    // Correction terms B_2j/(2j)! * s(s+1)...(s+2j-2) * N^(-s-2j+1).
    long J = 8;
    std::vector<BigRational> B;
    HPDecimal n2 = n * n;
    for (;;) {
        B = bernoulli_even(J);
        bool converged = false;
        HPDecimal corr(w);
        HPDecimal npow = HPDecimal(w, 1) / (ns * n);  // N^(-s-1)
        BigRational coef(s);  // rising factorial / (2j)!
        for (long j = 1; j <= J; ++j) {
            if (j > 1) {
                coef *= BigRational(BigInt(s + 2 * j - 3) * (s + 2 * j - 2), BigInt(2 * j - 1) * (2 * j));
                npow /= n2;
            } else {
                coef = BigRational(s, 2);
            }
            HPDecimal term = HPDecimal(w, B[j - 1] * coef) * npow;
            corr += term;
            if (term.log10_abs() < -w - 2) {
                converged = true;
                break;
            }
        }
        if (converged) {
            sum += corr;
            break;
        }
        if (J > 4 * w) throw Error(RM_ERR_PRECISION_UNACHIEVABLE, "Euler-Maclaurin correction did not converge");
        J *= 2;
    }
    return sum.with_digits(digits);
}

HPDecimal catalan_alternating(long digits) {
    long w = digits + kGuard;
    return alternating_sum(
               [&](long k, HPDecimal& out) {
                   unsigned long m = static_cast<unsigned long>(2 * k + 1);
                   mpfr_set_ui(out.raw(), 1, MPFR_RNDN);
                   mpfr_div_ui(out.raw(), out.raw(), m, MPFR_RNDN);
                   mpfr_div_ui(out.raw(), out.raw(), m, MPFR_RNDN);
               },
               w)
        .with_digits(digits);
}

HPDecimal catalan_ramanujan(long digits) {
    // G = pi/8 log(2+sqrt3) + 3/8 sum 1/((2k+1)^2 C(2k,k))
    long w = digits + kGuard;
    HPDecimal three(w, 3);
    HPDecimal lg = three.sqrt() + HPDecimal(w, 2);
    mpfr_log(lg.raw(), lg.raw(), MPFR_RNDN);
    HPDecimal first = pi_machin(w) * lg / HPDecimal(w, 8);
    HPDecimal sum(w), inv_binom(w, 1), t(w);
    for (unsigned long k = 0;; ++k) {
        if (k > 0) {
            // C(2k,k) = C(2k-2,k-1) * (2k)(2k-1)/k^2
            mpfr_mul_ui(inv_binom.raw(), inv_binom.raw(), k, MPFR_RNDN);
            mpfr_mul_ui(inv_binom.raw(), inv_binom.raw(), k, MPFR_RNDN);
            mpfr_div_ui(inv_binom.raw(), inv_binom.raw(), 2 * k, MPFR_RNDN);
            mpfr_div_ui(inv_binom.raw(), inv_binom.raw(), 2 * k - 1, MPFR_RNDN);
        }
        mpfr_div_ui(t.raw(), inv_binom.raw(), (2 * k + 1) * (2 * k + 1), MPFR_RNDN);
        sum += t;
        if (t.log10_abs() < -w - 2) break;
    }
    return (first + HPDecimal(w, 3) * sum / HPDecimal(w, 8)).with_digits(digits);
}

std::vector<BigRational> hat_zeta_symbolic(int s, long R) {
    if (s < 2 || R < 0) throw Error(RM_ERR_INVALID_ARGUMENT, "zhat needs s >= 2 and R >= 0");
    // table[r][t] for t = 2..s
    std::vector<std::vector<std::vector<BigRational>>> tab(static_cast<size_t>(R) + 1);
    auto unit = [&](int t) {
        std::vector<BigRational> v(static_cast<size_t>(s) + 1, BigRational(0));
        v[static_cast<size_t>(t)] = 1;
        return v;
    };
    for (long r = 0; r <= R; ++r) {
        tab[r].resize(static_cast<size_t>(s) + 1);
        for (int t = 2; t <= s; ++t) {
            if (r == 0) {
                tab[r][t] = unit(t);
            } else if (t == 2) {
                auto v = tab[r - 1][2];
                BigRational inv(1, BigInt(r) * r);
                v[0] -= inv;
                tab[r][t] = v;
            } else {
                auto v = tab[r - 1][t];
                const auto& w = tab[r][t - 1];
                for (size_t i = 0; i < v.size(); ++i) v[i] -= w[i] / BigRational(r);
                tab[r][t] = v;
            }
        }
    }
    return tab[R][s];
}

HPDecimal hat_zeta(int s, long R, long digits) {
    auto v = hat_zeta_symbolic(s, R);
    long w = digits + kGuard;
    HPDecimal acc(w, v[0]);
    for (int k = 2; k <= s; ++k)
        if (v[k] != 0) acc += HPDecimal(w, v[k]) * get_constant("zeta" + std::to_string(k), w);
    return acc.with_digits(digits);
}

HPDecimal lerch_neg1(int s, const BigRational& alpha, long digits) {
    if (alpha <= 0) throw Error(RM_ERR_INVALID_ARGUMENT, "alpha must be positive");
    if (s < 1) throw Error(RM_ERR_INVALID_ARGUMENT, "s must be positive");
    long w = digits + kGuard;
    BigRational x;
    return alternating_sum(
               [&](long k, HPDecimal& out) {
                   x = alpha + k;
                   BigInt num, den;
                   mpz_pow_ui(num.get_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(s));
                   mpz_pow_ui(den.get_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(s));
                   mpfr_set_z(out.raw(), num.get_mpz_t(), MPFR_RNDN);
                   mpfr_div_z(out.raw(), out.raw(), den.get_mpz_t(), MPFR_RNDN);
               },
               w)
        .with_digits(digits);
}

}  // namespace rm
