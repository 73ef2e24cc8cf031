#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rm/mat2.hpp"
#include "rm/numeric.hpp"
#include "rm/poly.hpp"

namespace rm {

// Polynomial continued fraction a(0) + b(1)/(a(1) + b(2)/(a(2) + ...)).
class Pcf {
public:
    Pcf(IntPolynomial a, IntPolynomial b);
    static Pcf parse(const std::string& a, const std::string& b);

    const IntPolynomial& a() const { return a_; }
    const IntPolynomial& b() const { return b_; }
    int deg_a() const { return a_.total_degree(); }
    int deg_b() const { return b_.total_degree(); }

    void a_at(long n, BigInt& out) const { eval_at(da_, n, out); }
    void b_at(long n, BigInt& out) const { eval_at(db_, n, out); }
    BigInt a_at(long n) const { return eval_at(da_, n); }
    BigInt b_at(long n) const { return eval_at(db_, n); }

    std::string json() const;  // {"a": text, "b": text}
    std::string key() const { return a_.str() + "|" + b_.str(); }

private:
    IntPolynomial a_, b_;
    std::vector<BigInt> da_, db_;
};

struct ConvergentState {
    long depth = 0;
    BigInt p_prev, p, q_prev, q;
};

ConvergentState initial_state(const Pcf& pcf);
void step_in_place(ConvergentState& s, const Pcf& pcf);
ConvergentState step(const ConvergentState& s, const Pcf& pcf);
ConvergentState advance_to(const Pcf& pcf, long depth);

// 32, 48, 80, 128, ...: gaps grow by 16 per sample. Values <= max_depth; max_depth itself
// is appended when `include_end` is set.
std::vector<long> backoff_schedule(long max_depth, bool include_end = true, long n0 = 32, long c = 16);

enum class Accel { None, Richardson, Auto };

struct LimitOptions {
    long margin = 5;
    long working_digits = 0;  // 0: target + margin + guard
    Accel accel = Accel::Auto;
    long richardson_order = 0;  // 0: automatic
};

struct PrecisionReport {
    long depth = 0;
    long digits = 0;  // certified K
    HPDecimal value{10};
    bool terminated = false;
    std::optional<BigRational> exact;
    std::string method = "plain";
    std::vector<std::pair<long, long>> history;  // (depth, K)
};

PrecisionReport pcf_limit(const Pcf& pcf, long max_depth, long target_digits, const LimitOptions& opt = {});

// Richardson extrapolation of a sequence sampled at consecutive indices N..N+m.
HPDecimal richardson(const std::vector<HPDecimal>& s, long N, long m, long digits);

struct MatrixForm {
    IntMat initial;
    PolyMat step;  // in variable n
};

MatrixForm pcf_to_matrix(const Pcf& pcf);

std::string precision_report_json(const PrecisionReport& r, long print_digits);

}  // namespace rm
