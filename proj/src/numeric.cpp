#include "rm/numeric.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace rm {

long decimal_digits(const BigInt& v) {
    if (v == 0) return 0;
    size_t n = mpz_sizeinbase(v.get_mpz_t(), 10);
    // mpz_sizeinbase may overshoot by one.
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, n - 1);
    BigInt a = abs(v);
    return a >= p ? static_cast<long>(n) : static_cast<long>(n - 1);
}

double ln_abs(const BigInt& v) {
    if (v == 0) return -std::numeric_limits<double>::infinity();
    long exp = 0;
    double m = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return std::log(std::fabs(m)) + static_cast<double>(exp) * std::log(2.0);
}

BigInt gcd(const BigInt& a, const BigInt& b) {
    BigInt g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

long bits_for_digits(long digits) {
    if (digits < 1) digits = 1;
    return static_cast<long>(std::ceil(digits * 3.3219280948873623)) + 16;
}

void HPDecimal::init(long digits) {
    digits_ = digits < 1 ? 1 : digits;
    mpfr_init2(v_, bits_for_digits(digits_));
}

HPDecimal::HPDecimal(long digits) {
    init(digits);
    mpfr_set_zero(v_, 1);
}

HPDecimal::HPDecimal(long digits, long v) {
    init(digits);
    mpfr_set_si(v_, v, MPFR_RNDN);
}

HPDecimal::HPDecimal(long digits, const BigInt& v) {
    init(digits);
    mpfr_set_z(v_, v.get_mpz_t(), MPFR_RNDN);
}

HPDecimal::HPDecimal(long digits, const BigRational& v) {
    init(digits);
    mpfr_set_q(v_, v.get_mpq_t(), MPFR_RNDN);
}

HPDecimal::HPDecimal(long digits, const std::string& text) {
    init(digits);
    mpfr_set_str(v_, text.c_str(), 10, MPFR_RNDN);
}

HPDecimal::HPDecimal(const HPDecimal& o) {
    init(o.digits_);
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

HPDecimal::HPDecimal(HPDecimal&& o) noexcept {
    init(o.digits_);
    mpfr_swap(v_, o.v_);
}

HPDecimal& HPDecimal::operator=(const HPDecimal& o) {
    if (this != &o) {
        mpfr_set_prec(v_, mpfr_get_prec(o.v_));
        digits_ = o.digits_;
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

HPDecimal& HPDecimal::operator=(HPDecimal&& o) noexcept {
    std::swap(digits_, o.digits_);
    mpfr_swap(v_, o.v_);
    return *this;
}

HPDecimal::~HPDecimal() { mpfr_clear(v_); }

HPDecimal HPDecimal::with_digits(long digits) const {
    HPDecimal r(digits);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
}

HPDecimal HPDecimal::operator-() const {
    HPDecimal r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
}

namespace {
// Results take the larger of the two precisions.
void widen(HPDecimal& a, const HPDecimal& b) {
    if (b.digits() > a.digits()) a = a.with_digits(b.digits());
}
}  // namespace

HPDecimal& HPDecimal::operator+=(const HPDecimal& o) {
    widen(*this, o);
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

HPDecimal& HPDecimal::operator-=(const HPDecimal& o) {
    widen(*this, o);
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

HPDecimal& HPDecimal::operator*=(const HPDecimal& o) {
    widen(*this, o);
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

HPDecimal& HPDecimal::operator/=(const HPDecimal& o) {
    widen(*this, o);
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

HPDecimal HPDecimal::abs() const {
    HPDecimal r(*this);
    mpfr_abs(r.v_, r.v_, MPFR_RNDN);
    return r;
}

HPDecimal HPDecimal::sqrt() const {
    HPDecimal r(*this);
    mpfr_sqrt(r.v_, r.v_, MPFR_RNDN);
    return r;
}

double HPDecimal::to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

double HPDecimal::log10_abs() const {
    if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
    long exp = 0;
    double m = mpfr_get_d_2exp(&exp, v_, MPFR_RNDN);
    return std::log10(std::fabs(m)) + static_cast<double>(exp) * std::log10(2.0);
}

double HPDecimal::ln_abs() const { return log10_abs() * std::log(10.0); }

bool HPDecimal::is_zero() const { return mpfr_zero_p(v_) != 0; }

int HPDecimal::sign() const { return mpfr_sgn(v_); }

BigInt HPDecimal::round() const {
    BigInt r;
    mpfr_get_z(r.get_mpz_t(), v_, MPFR_RNDN);
    return r;
}

BigInt HPDecimal::floor() const {
    BigInt r;
    mpfr_get_z(r.get_mpz_t(), v_, MPFR_RNDD);
    return r;
}

std::string HPDecimal::to_string(long frac) const {
    if (frac < 0) frac = 0;
    HPDecimal scaled = *this * pow10(frac, digits_ + frac + 10);
    BigInt t;
    mpfr_get_z(t.get_mpz_t(), scaled.v_, MPFR_RNDZ);
    bool neg = t < 0 || (t == 0 && sign() < 0);
    std::string s = BigInt(::abs(t)).get_str();
    if (static_cast<long>(s.size()) <= frac) s.insert(0, static_cast<size_t>(frac + 1 - s.size()), '0');
    std::string out = s.substr(0, s.size() - frac);
    if (frac > 0) out += "." + s.substr(s.size() - frac);
    return neg ? "-" + out : out;
}

HPDecimal HPDecimal::ratio(const BigInt& p, const BigInt& q, long digits) {
    HPDecimal r(digits, p);
    HPDecimal d(digits, q);
    mpfr_div(r.v_, r.v_, d.v_, MPFR_RNDN);
    return r;
}

HPDecimal HPDecimal::pow10(long e, long digits) {
    HPDecimal r(digits, 10);
    mpfr_pow_si(r.v_, r.v_, e, MPFR_RNDN);
    return r;
}

long agreement_digits(const HPDecimal& a, const HPDecimal& b, long cap) {
    HPDecimal d = (a - b).abs();
    if (d.is_zero()) return cap;
    double l = -d.log10_abs();
    if (l > cap) return cap;
    return static_cast<long>(std::floor(l));
}

long shared_digits(const HPDecimal& a, const HPDecimal& b, long cap) {
    long k = agreement_digits(a, b, cap);
    long prec = std::min(a.digits(), b.digits()) + 10;
    // The floors can still differ around a digit boundary; walk down until they agree.
    while (k >= 0) {
        HPDecimal s = HPDecimal::pow10(k, prec + k);
        if ((a * s).floor() == (b * s).floor()) return k;
        --k;
    }
    return (a.floor() == b.floor()) ? 0 : -1;
}

}  // namespace rm
