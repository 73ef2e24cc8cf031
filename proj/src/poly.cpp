#include "rm/poly.hpp"

#include <algorithm>
#include <cctype>

namespace rm {

namespace {

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

    IntPolynomial run() {
        IntPolynomial p = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& why) {
        throw Error(RM_ERR_SYNTAX, why + " at byte " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    IntPolynomial expr() {
        IntPolynomial acc(vars_);
        char c = peek();
        bool neg = false;
        if (c == '+' || c == '-') {
            neg = c == '-';
            ++pos_;
        }
        IntPolynomial t = term();
        acc = neg ? -t : t;
        for (;;) {
            c = peek();
            if (c != '+' && c != '-') break;
            ++pos_;
            IntPolynomial u = term();
            if (c == '+') acc += u; else acc -= u;
        }
        return acc;
    }

    IntPolynomial term() {
        bool literal = false;
        IntPolynomial acc = factor(&literal);
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                acc = acc * factor(&literal);
            } else if (c == '(' && literal) {
                acc = acc * factor(&literal);
            } else {
                break;
            }
        }
        return acc;
    }

    IntPolynomial factor(bool* literal) {
        IntPolynomial b = base(literal);
        if (peek() == '^') {
            ++pos_;
            skip();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected exponent");
            if (pos_ - start > 4) fail("exponent too large");
            unsigned k = static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start)));
            if (k > 1000) fail("exponent too large");
            *literal = false;
            return b.pow(k);
        }
        return b;
    }

    IntPolynomial base(bool* literal) {
        char c = peek();
        *literal = false;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                fail("implicit multiplication");
            *literal = true;
            return IntPolynomial::constant(vars_, BigInt(s_.substr(start, pos_ - start)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it == vars_.end())
                throw Error(RM_ERR_UNKNOWN_VARIABLE,
                            "unknown variable '" + name + "' at byte " + std::to_string(start));
            if (peek() == '(') fail("implicit multiplication");
            return IntPolynomial::variable(vars_, static_cast<size_t>(it - vars_.begin()));
        }
        if (c == '(') {
            ++pos_;
            IntPolynomial e = expr();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return e;
        }
        if (c == '\0') fail("unexpected end of input");
        fail("unexpected character");
    }

    const std::string& s_;
    const std::vector<std::string>& vars_;
    size_t pos_ = 0;
};

}  // namespace

IntPolynomial parse_poly(const std::string& text, const std::vector<std::string>& vars) {
    return Parser(text, vars).run();
}

RatPolynomial to_rational(const IntPolynomial& p) {
    RatPolynomial r(p.vars());
    for (const auto& [e, c] : p.terms()) r.add_term(e, BigRational(c));
    return r;
}

IntPolynomial clear_denominators(const RatPolynomial& p, BigRational* scale) {
    BigInt l = 1, g = 0;
    for (const auto& [e, c] : p.terms()) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    }
    if (g == 0) g = 1;
    BigRational k(l, g);
    k.canonicalize();
    IntPolynomial r(p.vars());
    for (const auto& [e, c] : p.terms()) {
        BigRational v = c * k;
        r.add_term(e, v.get_num());
    }
    if (scale) *scale = k;
    return r;
}

BigInt content(const IntPolynomial& p) {
    BigInt g = 0;
    for (const auto& [e, c] : p.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;
}

IntPolynomial exact_div(const IntPolynomial& p, const BigInt& k) {
    IntPolynomial r(p.vars());
    for (const auto& [e, c] : p.terms()) {
        BigInt q;
        mpz_divexact(q.get_mpz_t(), c.get_mpz_t(), k.get_mpz_t());
        r.add_term(e, q);
    }
    return r;
}

std::optional<RatPolynomial> divide_exact(const RatPolynomial& a, const RatPolynomial& b) {
    a.check_ring(b);
    if (b.is_zero()) return std::nullopt;
    const auto& lead = *b.terms().begin();
    RatPolynomial rem = a;
    RatPolynomial quo(a.vars());
    size_t guard = 0;
    while (!rem.is_zero()) {
        const auto& lt = *rem.terms().begin();
        Exponents e(lt.first.size());
        for (size_t i = 0; i < e.size(); ++i) {
            if (lt.first[i] < lead.first[i]) return std::nullopt;
            e[i] = static_cast<uint16_t>(lt.first[i] - lead.first[i]);
        }
        BigRational c = lt.second / lead.second;
        RatPolynomial t(a.vars());
        t.add_term(e, c);
        quo += t;
        rem -= t * b;
        if (++guard > 1000000) return std::nullopt;
    }
    return quo;
}

IntPolynomial with_vars(const IntPolynomial& p, const std::vector<std::string>& to) {
    std::vector<size_t> map(p.nvars());
    for (size_t i = 0; i < p.nvars(); ++i) {
        auto it = std::find(to.begin(), to.end(), p.vars()[i]);
        map[i] = it == to.end() ? to.size() : static_cast<size_t>(it - to.begin());
    }
    IntPolynomial r(to);
    for (const auto& [e, c] : p.terms()) {
        Exponents f(to.size(), 0);
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (map[i] == to.size())
                throw Error(RM_ERR_UNKNOWN_VARIABLE, "variable '" + p.vars()[i] + "' not in target list");
            f[map[i]] = static_cast<uint16_t>(f[map[i]] + e[i]);
        }
        r.add_term(f, c);
    }
    return r;
}

std::vector<BigInt> dense_coeffs(const IntPolynomial& p) {
    if (p.nvars() > 1) throw Error(RM_ERR_ARITY, "expected a univariate polynomial");
    int d = p.total_degree();
    std::vector<BigInt> c(d < 0 ? 1 : static_cast<size_t>(d) + 1, BigInt(0));
    for (const auto& [e, v] : p.terms()) c[e.empty() ? 0 : e[0]] = v;
    while (c.size() > 1 && c.back() == 0) c.pop_back();
    return c;
}

IntPolynomial from_dense(const std::vector<BigInt>& c, const std::string& var) {
    IntPolynomial r({var});
    for (size_t i = 0; i < c.size(); ++i) r.add_term(Exponents{static_cast<uint16_t>(i)}, c[i]);
    return r;
}

void eval_at(const std::vector<BigInt>& dense, long n, BigInt& out) {
    out = 0;
    for (size_t i = dense.size(); i-- > 0;) {
        mpz_mul_si(out.get_mpz_t(), out.get_mpz_t(), n);
        mpz_add(out.get_mpz_t(), out.get_mpz_t(), dense[i].get_mpz_t());
    }
}

BigInt eval_at(const std::vector<BigInt>& dense, long n) {
    BigInt r;
    eval_at(dense, n, r);
    return r;
}

namespace {

using Dense = std::vector<BigInt>;

void trim(Dense& a) {
    while (a.size() > 1 && a.back() == 0) a.pop_back();
}

bool dense_zero(const Dense& a) { return a.size() == 1 && a[0] == 0; }

BigInt dense_content(const Dense& a) {
    BigInt g = 0;
    for (const auto& c : a) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;
}

Dense primitive(Dense a) {
    BigInt g = dense_content(a);
    if (g == 0) return a;
    if (a.back() < 0) g = -g;
    for (auto& c : a) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    return a;
}

// Pseudo-remainder of a by b.
Dense prem(Dense a, const Dense& b) {
    const BigInt& lb = b.back();
    while (!dense_zero(a) && a.size() >= b.size()) {
        BigInt la = a.back();
        size_t shift = a.size() - b.size();
        for (auto& c : a) c *= lb;
        for (size_t i = 0; i < b.size(); ++i) a[i + shift] -= la * b[i];
        a.pop_back();
        if (a.empty()) a.push_back(0);
        trim(a);
    }
    return a;
}

}  // namespace

IntPolynomial gcd_univariate(const IntPolynomial& pa, const IntPolynomial& pb) {
    std::string var = !pa.vars().empty() ? pa.vars()[0] : (!pb.vars().empty() ? pb.vars()[0] : "n");
    Dense a = dense_coeffs(pa), b = dense_coeffs(pb);
    auto positive = [&](Dense d) {
        if (d.back() < 0)
            for (auto& c : d) c = -c;
        return from_dense(d, var);
    };
    if (dense_zero(a)) return positive(b);
    if (dense_zero(b)) return positive(a);
    BigInt g = gcd(dense_content(a), dense_content(b));
    a = primitive(a);
    b = primitive(b);
    if (a.size() < b.size()) std::swap(a, b);
    while (!dense_zero(b)) {
        Dense r = prem(a, b);
        a = b;
        b = dense_zero(r) ? r : primitive(r);
    }
    a = primitive(a);
    for (auto& c : a) c *= g;
    return from_dense(a, var);
}

std::optional<IntPolynomial> div_univariate(const IntPolynomial& pa, const IntPolynomial& pb) {
    std::string var = pa.vars().empty() ? "n" : pa.vars()[0];
    Dense a = dense_coeffs(pa), b = dense_coeffs(pb);
    if (dense_zero(b)) return std::nullopt;
    if (dense_zero(a)) return from_dense({BigInt(0)}, var);
    if (a.size() < b.size()) return std::nullopt;
    Dense q(a.size() - b.size() + 1, BigInt(0));
    const BigInt& lb = b.back();
    while (!dense_zero(a) && a.size() >= b.size()) {
        size_t shift = a.size() - b.size();
        if (!mpz_divisible_p(a.back().get_mpz_t(), lb.get_mpz_t())) return std::nullopt;
        BigInt t;
        mpz_divexact(t.get_mpz_t(), a.back().get_mpz_t(), lb.get_mpz_t());
        q[shift] = t;
        for (size_t i = 0; i < b.size(); ++i) a[i + shift] -= t * b[i];
        a.pop_back();
        if (a.empty()) a.push_back(0);
        trim(a);
    }
    if (!dense_zero(a)) return std::nullopt;
    return from_dense(q, var);
}

}  // namespace rm
