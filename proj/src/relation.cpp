#include "rm/relation.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "rm/constants.hpp"
#include "rm/error.hpp"

namespace rm {

namespace {

constexpr long kGuard = 5;

// Nearest integer of an MPFR value.
BigInt nint(const HPDecimal& x) { return x.round(); }

void mul_z(HPDecimal& out, const HPDecimal& x, const BigInt& t) {
    out = x;
    mpfr_mul_z(out.raw(), out.raw(), t.get_mpz_t(), MPFR_RNDN);
}

HPDecimal dot(const std::vector<BigInt>& c, const std::vector<HPDecimal>& z, long digits) {
    HPDecimal acc(digits), t(digits);
    for (size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        mul_z(t, z[i], c[i]);
        acc += t;
    }
    return acc;
}

bool better(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    long la = coefficient_digits(a), lb = coefficient_digits(b);
    if (la != lb) return la < lb;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string constant_of(const std::string& name) {
    if (!is_constant_name(name)) throw Error(RM_ERR_UNKNOWN_CONSTANT, "unknown constant '" + name + "'");
    return name;
}

std::vector<std::string> numerator_basis(const std::vector<std::string>& constants, bool products) {
    std::vector<std::string> basis{"1"};
    for (auto& c : constants) basis.push_back(constant_of(c));
    if (products)
        for (size_t i = 0; i < constants.size(); ++i)
            for (size_t j = i; j < constants.size(); ++j) basis.push_back(constants[i] + "*" + constants[j]);
    return basis;
}

HPDecimal basis_value(const std::string& term, long digits) {
    if (term == "1") return HPDecimal(digits, 1);
    auto star = term.find('*');
    if (star == std::string::npos) return get_constant(term, digits);
    return get_constant(term.substr(0, star), digits) * get_constant(term.substr(star + 1), digits);
}

Match run_match(const HPDecimal& v, const std::vector<std::string>& basis, long max_coeff_digits, long margin) {
    long K = v.digits();
    if (K < 25) throw Error(RM_ERR_PRECISION_TOO_LOW, "matching needs at least 25 digits");
    if (basis.size() > 8) throw Error(RM_ERR_INVALID_ARGUMENT, "at most 8 numerator basis elements");
    std::vector<HPDecimal> z;
    for (auto& t : basis) z.push_back(basis_value(t, K));
    size_t n = z.size();
    for (size_t i = 0; i < n; ++i) z.push_back(-(v * z[i]));
    PslqOutcome out = pslq(z, max_coeff_digits, K - kGuard);
    if (!out.relation) throw Error(RM_ERR_NO_MATCH, "no relation with coefficients below 10^" + std::to_string(max_coeff_digits));
    Match m;
    m.relation = *out.relation;
    m.numerator_basis = basis;
    bool den_zero = std::all_of(m.relation.coefficients.begin() + static_cast<long>(n), m.relation.coefficients.end(),
                                [](const BigInt& c) { return c == 0; });
    if (den_zero) throw Error(RM_ERR_NO_MATCH, "relation among the constants alone; v does not enter");
    if (!overfit_filter(m.relation, margin))
        throw Error(RM_ERR_LOW_CONFIDENCE, "confidence " + std::to_string(m.relation.confidence()) + " below margin " +
                                              std::to_string(margin) + " for " + m.expression());
    return m;
}

std::string linear_text(const std::vector<BigInt>& c, const std::vector<std::string>& basis, size_t off) {
    std::string s;
    for (size_t i = 0; i < basis.size(); ++i) {
        const BigInt& k = c[off + i];
        if (k == 0) continue;
        BigInt a = abs(k);
        std::string term = basis[i] == "1" ? a.get_str() : (a == 1 ? basis[i] : a.get_str() + "*" + basis[i]);
        if (s.empty()) s = (k < 0 ? "-" : "") + term;
        else s += (k < 0 ? "-" : "+") + term;
    }
    return s.empty() ? "0" : s;
}

}  // namespace

long coefficient_digits(const std::vector<BigInt>& c) {
    long l = 0;
    for (auto& x : c) l += decimal_digits(x);
    return l;
}

void normalize_relation(std::vector<BigInt>& c) {
    BigInt g = 0;
    for (auto& x : c) g = gcd(g, x);
    if (g == 0) return;
    for (auto& x : c) x /= g;
    for (auto& x : c)
        if (x != 0) {
            if (x < 0)
                for (auto& y : c) y = -y;
            break;
        }
}

bool overfit_filter(const Relation& r, long margin) { return r.confidence() >= margin; }

PslqOutcome pslq(const std::vector<HPDecimal>& zin, long max_coeff_digits, long tol_digits) {
    const size_t n = zin.size();
    if (n < 2) throw Error(RM_ERR_INVALID_ARGUMENT, "pslq needs at least two values");
    long prec = zin[0].digits();
    for (auto& z : zin) prec = std::min(prec, z.digits());
    if (prec < tol_digits + kGuard)
        throw Error(RM_ERR_PRECISION_TOO_LOW, "working precision " + std::to_string(prec) + " below tolerance " +
                                                  std::to_string(tol_digits) + " plus guard");
    PslqOutcome out;
    std::vector<HPDecimal> x;
    for (auto& z : zin) x.push_back(z.with_digits(prec));

    HPDecimal maxabs(prec);
    for (auto& z : x)
        if (z.abs() > maxabs) maxabs = z.abs();
    HPDecimal eps = HPDecimal::pow10(-tol_digits, prec) * maxabs;

    // A value that is zero at this precision is itself a relation.
    for (size_t i = 0; i < n; ++i)
        if (!(x[i].abs() > eps)) {
            Relation r;
            r.coefficients.assign(n, BigInt(0));
            r.coefficients[i] = 1;
            r.residual = x[i].abs();
            r.input_digits = tol_digits + kGuard;
            r.coeff_digits = 1;
            out.relation = r;
            return out;
        }

    const HPDecimal gamma = HPDecimal(prec, 4) / HPDecimal(prec, 3);  // gamma^2, gamma = 2/sqrt(3)
    std::vector<HPDecimal> s(n, HPDecimal(prec)), y(n, HPDecimal(prec));
    {
        HPDecimal acc(prec);
        for (size_t k = n; k-- > 0;) {
            acc += x[k] * x[k];
            s[k] = acc.sqrt();
        }
        HPDecimal t = s[0];
        for (size_t k = 0; k < n; ++k) {
            y[k] = x[k] / t;
            s[k] = s[k] / t;
        }
    }
    // H is n x (n-1), row-major.
    std::vector<HPDecimal> H(n * (n - 1), HPDecimal(prec));
    auto h = [&](size_t i, size_t j) -> HPDecimal& { return H[i * (n - 1) + j]; };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n - 1; ++j) {
            if (i < j) continue;
            if (i == j) h(i, j) = s[j + 1] / s[j];
            else h(i, j) = -(y[i] * y[j]) / (s[j] * s[j + 1]);
        }
    std::vector<BigInt> A(n * n, BigInt(0)), B(n * n, BigInt(0));
    auto a = [&](size_t i, size_t j) -> BigInt& { return A[i * n + j]; };
    auto b = [&](size_t i, size_t j) -> BigInt& { return B[i * n + j]; };
    for (size_t i = 0; i < n; ++i) a(i, i) = b(i, i) = 1;

    HPDecimal tmp(prec);
    auto reduce_entry = [&](size_t i, size_t j) {
        if (h(j, j).is_zero()) return;
        BigInt t = nint(h(i, j) / h(j, j));
        if (t == 0) return;
        mul_z(tmp, y[i], t);
        y[j] += tmp;
        for (size_t k = 0; k <= j; ++k) {
            mul_z(tmp, h(j, k), t);
            h(i, k) -= tmp;
        }
        for (size_t k = 0; k < n; ++k) {
            a(i, k) -= t * a(j, k);
            b(k, j) += t * b(k, i);
        }
    };
    for (size_t i = 1; i < n; ++i)
        for (size_t j = i; j-- > 0;) reduce_entry(i, j);

    const double coeff_limit = std::pow(10.0, static_cast<double>(max_coeff_digits));
    const long max_iter = 200 * static_cast<long>(n) * std::max<long>(prec, 20);
    const long a_digits_limit = prec - kGuard;

    auto candidate = [&]() -> std::optional<std::vector<BigInt>> {
        std::optional<std::vector<BigInt>> best;
        for (size_t j = 0; j < n; ++j) {
            if (y[j].abs() > eps) continue;
            std::vector<BigInt> c(n);
            for (size_t i = 0; i < n; ++i) c[i] = b(i, j);
            normalize_relation(c);
            if (!best || better(c, *best)) best = c;
        }
        return best;
    };

    for (long iter = 0; iter < max_iter; ++iter) {
        out.iterations = iter;
        if (auto c = candidate()) {
            BigInt maxc = 0;
            for (auto& v : *c) maxc = std::max(maxc, BigInt(abs(v)));
            if (decimal_digits(maxc) > max_coeff_digits) return out;
            Relation r;
            r.coefficients = *c;
            r.residual = dot(*c, x, prec).abs();
            r.input_digits = tol_digits + kGuard;
            r.coeff_digits = coefficient_digits(*c);
            out.relation = r;
            return out;
        }
        // Norm bound from the diagonal of H.
        HPDecimal hmax(prec);
        for (size_t j = 0; j < n - 1; ++j)
            if (h(j, j).abs() > hmax) hmax = h(j, j).abs();
        if (!hmax.is_zero()) {
            out.norm_bound = 1.0 / hmax.to_double();
            if (out.norm_bound > coeff_limit * std::sqrt(static_cast<double>(n))) return out;
        }
        // Entries of A beyond the precision mean the precision is exhausted.
        for (auto& v : A)
            if (decimal_digits(v) > a_digits_limit) return out;

        size_t m = 0;
        HPDecimal best(prec);
        {
            HPDecimal gpow = gamma.sqrt();
            HPDecimal gcur = gpow;
            for (size_t i = 0; i < n - 1; ++i) {
                HPDecimal v = gcur * h(i, i).abs();
                if (i == 0 || v > best) {
                    best = v;
                    m = i;
                }
                gcur *= gpow;
            }
        }
        std::swap(y[m], y[m + 1]);
        for (size_t k = 0; k < n - 1; ++k) std::swap(h(m, k), h(m + 1, k));
        for (size_t k = 0; k < n; ++k) {
            std::swap(a(m, k), a(m + 1, k));
            std::swap(b(k, m), b(k, m + 1));
        }
        if (m + 2 < n) {
            HPDecimal t0 = (h(m, m) * h(m, m) + h(m, m + 1) * h(m, m + 1)).sqrt();
            if (!t0.is_zero()) {
                HPDecimal t1 = h(m, m) / t0, t2 = h(m, m + 1) / t0;
                for (size_t i = m; i < n; ++i) {
                    HPDecimal t3 = h(i, m), t4 = h(i, m + 1);
                    h(i, m) = t1 * t3 + t2 * t4;
                    h(i, m + 1) = t1 * t4 - t2 * t3;
                }
            }
        }
        for (size_t i = m + 1; i < n; ++i)
            for (size_t j = std::min(i - 1, m + 1) + 1; j-- > 0;) reduce_entry(i, j);
    }
    return out;
}

std::string Match::expression() const {
    size_t n = numerator_basis.size();
    return "(" + linear_text(relation.coefficients, numerator_basis, 0) + ")/(" +
           linear_text(relation.coefficients, numerator_basis, n) + ")";
}

std::string Match::json() const {
    nlohmann::json j;
    j["value_digits"] = relation.input_digits;
    std::vector<std::string> basis = numerator_basis;
    for (auto& t : numerator_basis) basis.push_back(t == "1" ? "-v" : "-v*" + t);
    j["basis"] = basis;
    std::vector<std::string> c;
    for (auto& x : relation.coefficients) c.push_back(x.get_str());
    j["coefficients"] = c;
    j["coeff_digits"] = relation.coeff_digits;
    j["confidence"] = relation.confidence();
    j["validated_at_2x"] = validated_at_2x;
    j["expression"] = expression();
    return j.dump();
}

Match mobius_match(const HPDecimal& v, const std::string& constant, long max_coeff_digits, long margin) {
    return run_match(v, {"1", constant_of(constant)}, max_coeff_digits, margin);
}

Match extended_match(const HPDecimal& v, const std::vector<std::string>& constants, bool include_products,
                     long max_coeff_digits, long margin) {
    if (constants.empty()) throw Error(RM_ERR_INVALID_ARGUMENT, "no constants given");
    auto basis = numerator_basis(constants, include_products);
    if (basis.size() > 8) throw Error(RM_ERR_INVALID_ARGUMENT, "basis has " + std::to_string(basis.size()) + " elements; at most 8");
    return run_match(v, basis, max_coeff_digits, margin);
}

Match match_pcf(const Pcf& pcf, long max_depth, const std::vector<std::string>& constants, bool include_products,
                long margin, long max_coeff_digits) {
    auto value_at = [&](long depth) {
        PrecisionReport r = pcf_limit(pcf, depth, 4 * depth + 100);
        if (r.exact) return HPDecimal(200, *r.exact);
        return r.value.with_digits(std::max<long>(r.digits, 1));
    };
    auto run = [&](const HPDecimal& v) {
        if (constants.size() == 1 && !include_products) return mobius_match(v, constants[0], max_coeff_digits, margin);
        return extended_match(v, constants, include_products, max_coeff_digits, margin);
    };
    Match m = run(value_at(max_depth));
    try {
        Match m2 = run(value_at(2 * max_depth));
        m.validated_at_2x = m2.relation.coefficients == m.relation.coefficients;
    } catch (const Error&) {
        m.validated_at_2x = false;
    }
    return m;
}

HPDecimal evaluate_match(const Match& m, long digits) {
    size_t n = m.numerator_basis.size();
    HPDecimal num(digits), den(digits);
    for (size_t i = 0; i < n; ++i) {
        HPDecimal bv = basis_value(m.numerator_basis[i], digits);
        num += HPDecimal(digits, m.relation.coefficients[i]) * bv;
        den += HPDecimal(digits, m.relation.coefficients[n + i]) * bv;
    }
    return num / den;
}

}  // namespace rm
