#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rm/error.hpp"
#include "rm/numeric.hpp"

namespace rm {

using Exponents = std::vector<uint16_t>;

// Graded order, highest total degree first, ties broken lexicographically (largest first).
struct GrlexDesc {
    bool operator()(const Exponents& a, const Exponents& b) const {
        unsigned da = 0, db = 0;
        for (auto e : a) da += e;
        for (auto e : b) db += e;
        if (da != db) return da > db;
        return a > b;
    }
};

template <class C>
class Poly {
public:
    using Terms = std::map<Exponents, C, GrlexDesc>;

    Poly() = default;
    explicit Poly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static Poly constant(std::vector<std::string> vars, const C& c) {
        Poly p(std::move(vars));
        if (c != 0) p.terms_[Exponents(p.vars_.size(), 0)] = c;
        return p;
    }

    static Poly variable(std::vector<std::string> vars, size_t idx) {
        Poly p(std::move(vars));
        Exponents e(p.vars_.size(), 0);
        e.at(idx) = 1;
        p.terms_[e] = 1;
        return p;
    }

    const std::vector<std::string>& vars() const { return vars_; }
    size_t nvars() const { return vars_.size(); }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }

    void add_term(const Exponents& e, const C& c) {
        if (c == 0) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    int total_degree() const {
        if (terms_.empty()) return -1;
        int d = 0;
        for (auto e : terms_.begin()->first) d += e;
        return d;
    }

    int degree_in(size_t var) const {
        int d = terms_.empty() ? -1 : 0;
        for (const auto& [e, c] : terms_) d = std::max<int>(d, e[var]);
        return d;
    }

    C coeff(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? C(0) : it->second;
    }

    C constant_term() const { return coeff(Exponents(vars_.size(), 0)); }

    Poly operator-() const {
        Poly r(*this);
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }

    Poly& operator+=(const Poly& o) {
        check_ring(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    Poly& operator-=(const Poly& o) {
        check_ring(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    Poly operator*(const Poly& o) const {
        check_ring(o);
        Poly r(vars_);
        Exponents e(vars_.size());
        for (const auto& [ea, ca] : terms_)
            for (const auto& [eb, cb] : o.terms_) {
                for (size_t i = 0; i < e.size(); ++i) e[i] = static_cast<uint16_t>(ea[i] + eb[i]);
                r.add_term(e, ca * cb);
            }
        return r;
    }

    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly scaled(const C& k) const {
        Poly r(vars_);
        if (k == 0) return r;
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * k);
        return r;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend bool operator==(const Poly& a, const Poly& b) { return a.vars_ == b.vars_ && a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly pow(unsigned k) const {
        Poly r = constant(vars_, C(1));
        Poly b = *this;
        while (k) {
            if (k & 1u) r = r * b;
            k >>= 1u;
            if (k) b = b * b;
        }
        return r;
    }

    // Replace every variable i by subs[i]; all subs share one variable list.
    Poly substitute(const std::vector<Poly>& subs) const {
        if (subs.size() != vars_.size()) throw Error(RM_ERR_ARITY, "substitution arity mismatch");
        std::vector<std::string> tv = subs.empty() ? vars_ : subs[0].vars_;
        Poly r(tv);
        std::vector<std::vector<Poly>> powers(vars_.size());
        for (const auto& [e, c] : terms_) {
            Poly t = constant(tv, c);
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                auto& pw = powers[i];
                if (pw.empty()) pw.push_back(constant(tv, C(1)));
                while (pw.size() <= e[i]) pw.push_back(pw.back() * subs[i]);
                t = t * pw[e[i]];
            }
            r += t;
        }
        return r;
    }

    // x_var -> x_var + shift.
    Poly shifted(size_t var, const C& shift) const {
        std::vector<Poly> subs;
        for (size_t i = 0; i < vars_.size(); ++i) {
            Poly v = variable(vars_, i);
            if (i == var) v += constant(vars_, shift);
            subs.push_back(v);
        }
        return substitute(subs);
    }

    template <class V>
    V eval(const std::vector<V>& point) const {
        if (point.size() != vars_.size()) throw Error(RM_ERR_ARITY, "evaluation arity mismatch");
        V acc = 0;
        std::vector<std::vector<V>> powers(point.size());
        for (const auto& [e, c] : terms_) {
            V t = V(c);
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                auto& pw = powers[i];
                if (pw.empty()) pw.push_back(V(1));
                while (pw.size() <= e[i]) pw.push_back(pw.back() * point[i]);
                t *= pw[e[i]];
            }
            acc += t;
        }
        return acc;
    }

    std::string str() const;

    void check_ring(const Poly& o) const {
        if (o.vars_ != vars_) throw Error(RM_ERR_RING_MISMATCH, "polynomials over different variables");
    }

private:
    std::vector<std::string> vars_;
    Terms terms_;
};

using IntPolynomial = Poly<BigInt>;
using RatPolynomial = Poly<BigRational>;

IntPolynomial parse_poly(const std::string& text, const std::vector<std::string>& vars);

RatPolynomial to_rational(const IntPolynomial& p);
// Multiplies by the lcm of denominators and divides by the gcd of numerators; returns the
// scale factor used (result = p * scale).
IntPolynomial clear_denominators(const RatPolynomial& p, BigRational* scale = nullptr);
BigInt content(const IntPolynomial& p);
IntPolynomial exact_div(const IntPolynomial& p, const BigInt& k);
// Exact multivariate division over Q; nullopt when b does not divide a.
std::optional<RatPolynomial> divide_exact(const RatPolynomial& a, const RatPolynomial& b);
// Rename/reorder variables: `to` must contain every variable that appears in p.
IntPolynomial with_vars(const IntPolynomial& p, const std::vector<std::string>& to);

// Univariate helpers (single variable).
std::vector<BigInt> dense_coeffs(const IntPolynomial& p);  // index = power
IntPolynomial from_dense(const std::vector<BigInt>& c, const std::string& var);
BigInt eval_at(const std::vector<BigInt>& dense, long n);
void eval_at(const std::vector<BigInt>& dense, long n, BigInt& out);
// gcd over Z[x], positive leading coefficient.
IntPolynomial gcd_univariate(const IntPolynomial& a, const IntPolynomial& b);
// Exact univariate division over Z; nullopt when not divisible.
std::optional<IntPolynomial> div_univariate(const IntPolynomial& a, const IntPolynomial& b);

template <class C>
std::string Poly<C>::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        C mag = c < 0 ? C(-c) : c;
        if (first) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? "-" : "+";
        }
        first = false;
        std::string mono;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += vars_[i];
            if (e[i] > 1) mono += "^" + std::to_string(e[i]);
        }
        if (mono.empty()) {
            out += mag.get_str();
        } else if (mag == 1) {
            out += mono;
        } else {
            out += mag.get_str() + "*" + mono;
        }
    }
    return out;
}

}  // namespace rm
