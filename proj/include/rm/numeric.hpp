#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <string>

namespace rm {

using BigInt = mpz_class;
using BigRational = mpq_class;

// Number of decimal digits of |v|; 0 for v == 0.
long decimal_digits(const BigInt& v);

// Natural log of |v| (v != 0) without overflow at any size.
double ln_abs(const BigInt& v);

BigInt gcd(const BigInt& a, const BigInt& b);

long bits_for_digits(long digits);

// Real number at a fixed working precision, counted in decimal digits.
class HPDecimal {
public:
    explicit HPDecimal(long digits = 50);
    HPDecimal(long digits, long v);
    HPDecimal(long digits, const BigInt& v);
    HPDecimal(long digits, const BigRational& v);
    HPDecimal(long digits, const std::string& text);
    HPDecimal(const HPDecimal& o);
    HPDecimal(HPDecimal&& o) noexcept;
    HPDecimal& operator=(const HPDecimal& o);
    HPDecimal& operator=(HPDecimal&& o) noexcept;
    ~HPDecimal();

    long digits() const { return digits_; }
    HPDecimal with_digits(long digits) const;

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    HPDecimal operator-() const;
    HPDecimal& operator+=(const HPDecimal& o);
    HPDecimal& operator-=(const HPDecimal& o);
    HPDecimal& operator*=(const HPDecimal& o);
    HPDecimal& operator/=(const HPDecimal& o);

    HPDecimal abs() const;
    HPDecimal sqrt() const;
    double to_double() const;
    // log10 |x|; -inf for zero.
    double log10_abs() const;
    double ln_abs() const;
    bool is_zero() const;
    int sign() const;
    // Nearest integer.
    BigInt round() const;
    BigInt floor() const;

    // Fixed-point text with `frac` digits after the point (truncated, not rounded).
    std::string to_string(long frac) const;
    std::string to_string() const { return to_string(digits_); }

    friend HPDecimal operator+(HPDecimal a, const HPDecimal& b) { return a += b; }
    friend HPDecimal operator-(HPDecimal a, const HPDecimal& b) { return a -= b; }
    friend HPDecimal operator*(HPDecimal a, const HPDecimal& b) { return a *= b; }
    friend HPDecimal operator/(HPDecimal a, const HPDecimal& b) { return a /= b; }
    friend bool operator<(const HPDecimal& a, const HPDecimal& b) { return mpfr_less_p(a.v_, b.v_); }
    friend bool operator>(const HPDecimal& a, const HPDecimal& b) { return mpfr_greater_p(a.v_, b.v_); }

    static HPDecimal ratio(const BigInt& p, const BigInt& q, long digits);
    static HPDecimal pow10(long e, long digits);

private:
    void init(long digits);
    mpfr_t v_;
    long digits_;
};

// Largest k such that floor(a*10^k) == floor(b*10^k), capped at `cap`; negative when
// even the integer parts differ.
long shared_digits(const HPDecimal& a, const HPDecimal& b, long cap);

// Digits of agreement -log10|a-b|, capped.
long agreement_digits(const HPDecimal& a, const HPDecimal& b, long cap);

}  // namespace rm
