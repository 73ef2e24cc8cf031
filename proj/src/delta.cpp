#include "rm/delta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>

#include "json.hpp"

#include "rm/constants.hpp"
#include "rm/error.hpp"
#include "rm/relation.hpp"

namespace rm {

using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Cached target: grows geometrically so repeated requests stay cheap.
class CachedTarget {
public:
    explicit CachedTarget(std::function<HPDecimal(long)> compute) : compute_(std::move(compute)) {}
    HPDecimal get(long digits) {
        std::lock_guard<std::mutex> lock(mu_);
        if (!value_ || value_->digits() < digits) {
            long want = value_ ? std::max(digits, value_->digits() * 3 / 2) : digits;
            value_ = compute_(want);
        }
        return value_->with_digits(std::min(digits, value_->digits()));
    }

private:
    std::function<HPDecimal(long)> compute_;
    std::optional<HPDecimal> value_;
    std::mutex mu_;
};

TargetFn cached(std::function<HPDecimal(long)> compute) {
    auto c = std::make_shared<CachedTarget>(std::move(compute));
    return [c](long digits) { return c->get(digits); };
}

long needed_digits(const BigInt& q) { return 2 * decimal_digits(q) + 40; }

// Slope of y against x by least squares.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    if (n < 2) return kNaN;
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx == 0 ? kNaN : sxy / sxx;
}

void tail_stats(DeltaReport& r) {
    std::vector<double> v;
    for (auto& [n, d] : r.samples)
        if (std::isfinite(d)) v.push_back(d);
    if (v.empty()) {
        r.delta = r.delta_std = kNaN;
        return;
    }
    size_t k = std::max<size_t>(1, (v.size() + 3) / 4);
    double sum = 0;
    for (size_t i = v.size() - k; i < v.size(); ++i) sum += v[i];
    r.delta = sum / double(k);
    double ss = 0;
    for (size_t i = v.size() - k; i < v.size(); ++i) ss += (v[i] - r.delta) * (v[i] - r.delta);
    r.delta_std = k > 1 ? std::sqrt(ss / double(k - 1)) : 0.0;
}

// ln s: slope of ln|q| over the deepest half of (step, ln|q|) pairs.
double growth_slope(const std::vector<std::pair<long, double>>& lnq) {
    std::vector<double> x, y;
    for (size_t i = lnq.size() / 2; i < lnq.size(); ++i) {
        x.push_back(double(lnq[i].first));
        y.push_back(lnq[i].second);
    }
    return ls_slope(x, y);
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

bool singular(const IntMat& M) { return M.det() == 0; }

std::string traj_text(const Trajectory& t) {
    std::string s;
    for (size_t i = 0; i < t.direction.size(); ++i) s += (i ? "," : "") + std::to_string(t.direction[i]);
    return s;
}

}  // namespace

std::string DeltaReport::json() const {
    nlohmann::json j;
    j["method"] = method;
    j["delta"] = num(delta);
    j["delta_std"] = num(delta_std);
    j["ln_s"] = num(ln_s);
    j["ln_eigen_ratio"] = num(ln_eigen_ratio);
    j["direction"] = traj.direction;
    std::vector<std::string> start;
    for (const auto& s : traj.start) start.push_back(s.get_str());
    j["start"] = start;
    j["steps"] = steps;
    nlohmann::json smp = nlohmann::json::array();
    for (auto& [n, d] : samples) smp.push_back({n, num(d)});
    j["samples"] = smp;
    if (method == "ClosedForm") {
        j["eigenvalues"] = {{"max", eig_max}, {"min", eig_min}};
        j["eigenvalue_values"] = {num(eig_max_value), num(eig_min_value)};
        j["balanced_cell"] = balanced_cell;
        j["leading_matrix"] = leading_matrix;
        j["trace_leading"] = trace_leading;
        j["det_leading"] = det_leading;
    }
    return j.dump();
}

TargetFn fixed_target(const HPDecimal& L) {
    return [L](long digits) { return L.with_digits(std::min(digits, L.digits())); };
}

static std::optional<BigRational> parse_rational(const std::string& text) {
    static const std::string allowed = "+-0123456789/";
    if (text.empty() || text.find_first_not_of(allowed) != std::string::npos) return std::nullopt;
    try {
        BigRational r(text);
        r.canonicalize();
        return r;
    } catch (...) {
        return std::nullopt;
    }
}

TargetFn field_target(const MatrixField& field, const Trajectory& traj, const std::string& constant) {
    if (auto r = parse_rational(constant)) {
        BigRational v = *r;
        return [v](long digits) { return HPDecimal(digits, v); };
    }
    if (constant == "limit") {
        MatrixField f = field;
        Trajectory t = traj;
        return cached([f, t](long digits) {
            PrecisionReport rep = traj_limit(f, t, 400000, digits);
            if (rep.digits < digits)
                throw Error(RM_ERR_INSUFFICIENT_PRECISION,
                            "trajectory limit reached only " + std::to_string(rep.digits) + " digits");
            return rep.value.with_digits(digits);
        });
    }
    if (!is_constant_name(constant)) throw Error(RM_ERR_UNKNOWN_CONSTANT, "unknown constant: " + constant);
    PrecisionReport rep = traj_limit(field, traj, 20000, 80);
    if (rep.digits < 30)
        throw Error(RM_ERR_INSUFFICIENT_PRECISION, "trajectory limit too imprecise to identify the target");
    Match m = mobius_match(rep.value.with_digits(rep.digits), constant);
    return cached([m](long digits) { return evaluate_match(m, digits); });
}

double delta_of(const BigInt& p, const BigInt& q, const TargetFn& L) {
    if (q == 0) return kNaN;
    double lq = ln_abs(q);
    if (lq <= 0) return kNaN;
    long w = needed_digits(q);
    HPDecimal target = L(w);
    w = std::min(w, target.digits());
    HPDecimal err = (HPDecimal::ratio(p, q, w) - target).abs();
    if (err.is_zero() || -err.log10_abs() > double(w - 10))
        throw Error(RM_ERR_INSUFFICIENT_PRECISION, "distance to the target is below the precision floor");
    return -err.ln_abs() / lq - 1.0;
}

DeltaReport delta_sequence(const std::vector<std::tuple<long, BigInt, BigInt>>& seq, const TargetFn& L) {
    DeltaReport r;
    r.method = "Empirical";
    if (seq.empty()) throw Error(RM_ERR_INVALID_ARGUMENT, "empty sequence");
    BigInt qmax = 0;
    for (auto& [n, p, q] : seq)
        if (abs(q) > qmax) qmax = abs(q);
    TargetFn fixed = fixed_target(L(needed_digits(qmax)));
    std::vector<std::pair<long, double>> lnq;
    for (auto& [n, p, q] : seq) {
        r.samples.emplace_back(n, delta_of(p, q, fixed));
        if (q != 0) lnq.emplace_back(n, ln_abs(q));
    }
    r.steps = std::get<0>(seq.back());
    r.ln_s = growth_slope(lnq);
    tail_stats(r);
    return r;
}

DeltaReport delta_empirical(const MatrixField& field, const Trajectory& traj, const TargetFn& L, long steps) {
    if (steps < 2) throw Error(RM_ERR_INVALID_ARGUMENT, "steps must be at least 2");
    std::vector<long> sched = backoff_schedule(steps);
    if (sched.size() < 2) sched = {std::max(1L, steps / 2), steps};
    std::vector<std::tuple<long, BigInt, BigInt>> seq;
    for (const auto& s : walk(field, traj, sched)) seq.emplace_back(s.step, s.V(0, 1), s.V(1, 1));
    DeltaReport r = delta_sequence(seq, L);
    r.traj = traj;
    return r;
}

namespace {

// disc = k^2 m with m squarefree (m = -1 marks a negative discriminant's sign kept in m).
void squarefree_split(BigInt disc, BigInt& k, BigInt& m) {
    int sign = sgn(disc);
    disc = abs(disc);
    k = 1;
    m = 1;
    BigInt rest = disc;
    for (unsigned long p = 2; p < 100000 && BigInt(p) * p <= rest; ++p) {
        BigInt pp = BigInt(p) * p;
        while (mpz_divisible_p(rest.get_mpz_t(), pp.get_mpz_t())) {
            rest /= pp;
            k *= p;
        }
        while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
            rest /= p;
            m *= p;
        }
    }
    if (mpz_perfect_square_p(rest.get_mpz_t())) {
        BigInt r;
        mpz_sqrt(r.get_mpz_t(), rest.get_mpz_t());
        k *= r;
    } else {
        m *= rest;
    }
    m *= sign;
}

// (t + sign * k sqrt(m)) / 2 as text.
std::string surd_text(const BigInt& t, const BigInt& k, const BigInt& m, int sign) {
    std::string root = m == 1 ? "" : (m == -1 ? "i" : "sqrt(" + BigInt(m).get_str() + ")");
    if (m < -1) root = "i*sqrt(" + BigInt(-m).get_str() + ")";
    if (m == 1) {
        BigRational v(t + sign * k, 2);
        v.canonicalize();
        return v.get_str();
    }
    bool halves = (t % 2 == 0) && (k % 2 == 0);
    BigInt tt = halves ? BigInt(t / 2) : t;
    BigInt kk = halves ? BigInt(k / 2) : k;
    std::string s;
    if (tt != 0) s = tt.get_str();
    s += sign > 0 ? (tt != 0 ? "+" : "") : "-";
    if (kk != 1) s += kk.get_str() + "*";
    s += root;
    if (!halves) s = "(" + s + ")/2";
    return s;
}


// Conjugates by diag(n^k, 1) or diag(1, n^k) so the off-diagonal degrees meet, when the
// division stays polynomial. Trace and determinant asymptotics are unchanged either way.
PolyMat gauge_balance(const PolyMat& cell) {
    int d12 = cell.m[1].is_zero() ? -1 : cell.m[1].total_degree();
    int d21 = cell.m[2].is_zero() ? -1 : cell.m[2].total_degree();
    if (d12 < 0 || d21 < 0 || (d12 - d21) % 2 != 0 || d12 == d21) return cell;
    int k = std::abs(d12 - d21) / 2;
    const auto& vars = cell.m[0].vars();
    IntPolynomial n = IntPolynomial::variable(vars, 0);
    IntPolynomial nk = n.pow(unsigned(k));
    IntPolynomial n1k = (n + IntPolynomial::constant(vars, BigInt(1))).pow(unsigned(k));
    // d12 > d21: M' = diag(n^k,1)^-1 M diag((n+1)^k,1); otherwise the mirror image.
    int a = d12 > d21 ? 0 : 3, off = d12 > d21 ? 1 : 2, other = d12 > d21 ? 2 : 1;
    auto q_diag = div_univariate(cell.m[size_t(a)] * n1k, nk);
    auto q_off = div_univariate(cell.m[size_t(off)], nk);
    if (!q_diag || !q_off) return cell;
    PolyMat out = cell;
    out.m[size_t(a)] = *q_diag;
    out.m[size_t(off)] = *q_off;
    out.m[size_t(other)] = cell.m[size_t(other)] * n1k;
    return out;
}

}  // namespace

DeltaReport delta_closed_form(const MatrixField& field, const Trajectory& traj_in, long steps) {
    Trajectory traj = traj_in;
    if (traj.start.empty()) traj.start.assign(field.dimension(), BigRational(1));
    for (long d : traj.direction)
        if (d < 0) throw Error(RM_ERR_INVALID_ARGUMENT, "direction must be monotone");
    PolyMat cell = gauge_balance(balanced(unit_cell(field, traj)));
    auto tr = dense_coeffs(cell.m[0] + cell.m[3]);
    auto dt = dense_coeffs(poly_mat_det(cell));
    int deg_t = cell.m[0].is_zero() && cell.m[3].is_zero() ? -1 : int(tr.size()) - 1;
    while (deg_t >= 0 && tr[size_t(deg_t)] == 0) --deg_t;
    int deg_d = int(dt.size()) - 1;
    while (deg_d >= 0 && dt[size_t(deg_d)] == 0) --deg_d;
    int D = std::max(deg_t, (deg_d + 1) / 2);
    BigInt t = deg_t == D ? tr[size_t(D)] : BigInt(0);
    BigInt d = deg_d == 2 * D ? dt[size_t(2 * D)] : BigInt(0);
    std::vector<BigInt> lead(4);
    for (int i = 0; i < 4; ++i) {
        auto dense = dense_coeffs(cell.m[i]);
        lead[i] = size_t(D) < dense.size() ? dense[size_t(D)] : BigInt(0);
    }

    DeltaReport r;
    r.method = "ClosedForm";
    r.traj = traj;
    r.steps = steps;
    for (const auto& e : cell.m) r.balanced_cell.push_back(e.str());
    for (const auto& e : lead) r.leading_matrix.push_back(e.get_str());
    r.trace_leading = t.get_str();
    r.det_leading = d.get_str();

    BigInt disc = t * t - 4 * d;
    if (disc == 0 || d == 0)
        throw Error(RM_ERR_DEFECTIVE_LIMIT, "leading matrix has a repeated or zero eigenvalue (trace " + t.get_str() +
                                                ", det " + d.get_str() + "); delta undefined");
    BigInt k, m;
    squarefree_split(disc, k, m);
    double ratio;
    if (disc > 0) {
        double sq = std::sqrt(double(m.get_d())) * k.get_d();
        double e1 = (t.get_d() + sq) / 2, e2 = (t.get_d() - sq) / 2;
        int smax = std::fabs(e1) >= std::fabs(e2) ? 1 : -1;
        r.eig_max = surd_text(t, k, m, smax);
        r.eig_min = surd_text(t, k, m, -smax);
        r.eig_max_value = smax > 0 ? e1 : e2;
        r.eig_min_value = smax > 0 ? e2 : e1;
        // ln|e_max/e_min| = 2 ln|e_max| - ln|det|, stable when e_min is tiny
        ratio = 2 * std::log(std::fabs(r.eig_max_value)) - std::log(std::fabs(d.get_d()));
    } else {
        r.eig_max = surd_text(t, k, m, 1);
        r.eig_min = surd_text(t, k, m, -1);
        r.eig_max_value = r.eig_min_value = std::sqrt(std::fabs(d.get_d()));
        ratio = 0;
    }
    r.ln_eigen_ratio = ratio;

    std::vector<std::pair<long, double>> lnq;
    for (const auto& s : walk(field, traj, backoff_schedule(steps)))
        if (s.V(1, 1) != 0) lnq.emplace_back(s.step, ln_abs(s.V(1, 1)));
    r.ln_s = growth_slope(lnq);
    if (!std::isfinite(r.ln_s) || r.ln_s <= 0)
        throw Error(RM_ERR_INSUFFICIENT_PRECISION, "could not measure a positive growth rate");
    r.delta = ratio / r.ln_s - 1.0;
    r.delta_std = 0;
    return r;
}

namespace {

IntMat field_at(const MatrixField& field, size_t axis, long x, long y) {
    return eval_int(field.mats[axis], {BigInt(x), BigInt(y)});
}

void require_2d(const MatrixField& field) {
    if (field.dimension() != 2) throw Error(RM_ERR_ARITY, "delta maps need a two-dimensional field");
}

// Reduced potentials for grid cells; cell (x, y) is the walk from (1,1) through x steps along
// the first axis and y steps along the second. Singular cells are left empty.
std::vector<std::vector<std::optional<IntMat>>> potential_grid(const MatrixField& field, long xmax, long ymax,
                                                                long diag_max = -1) {
    std::vector<std::vector<std::optional<IntMat>>> grid(size_t(xmax + 1),
                                                         std::vector<std::optional<IntMat>>(size_t(ymax + 1)));
    std::optional<IntMat> base = field.initial;
    for (long x = 1; x <= xmax; ++x) {
        if (base) {
            IntMat M = field_at(field, 0, x, 1);
            if (singular(M)) {
                base.reset();
            } else {
                mul_into(*base, M);
                *base = divide_content(*base);
            }
        }
        std::optional<IntMat> V = base;
        for (long y = 1; y <= ymax; ++y) {
            if (diag_max >= 0 && x + y - 2 > diag_max) break;
            if (!V) break;
            IntMat M = field_at(field, 1, x + 1, y);
            if (singular(M)) break;
            mul_into(*V, M);
            *V = divide_content(*V);
            grid[size_t(x)][size_t(y)] = *V;
        }
    }
    return grid;
}

TargetFn pinned(const TargetFn& L, const std::vector<std::vector<std::optional<IntMat>>>& grid) {
    BigInt qmax = 0;
    for (const auto& row : grid)
        for (const auto& V : row)
            if (V && abs((*V)(1, 1)) > qmax) qmax = abs((*V)(1, 1));
    return fixed_target(L(needed_digits(qmax)));
}

double safe_delta(const IntMat& V, const TargetFn& L) {
    try {
        return delta_of(V(0, 1), V(1, 1), L);
    } catch (const Error& e) {
        if (e.code() == RM_ERR_INSUFFICIENT_PRECISION) return kNaN;
        throw;
    }
}

}  // namespace

std::vector<DeltaCell> delta_map(const MatrixField& field, long xmax, long ymax, const TargetFn& L) {
    require_2d(field);
    if (xmax < 1 || ymax < 1) throw Error(RM_ERR_INVALID_ARGUMENT, "grid bounds must be positive");
    auto grid = potential_grid(field, xmax, ymax);
    TargetFn fixed = pinned(L, grid);
    std::vector<DeltaCell> out;
    for (long x = 1; x <= xmax; ++x)
        for (long y = 1; y <= ymax; ++y) {
            const auto& V = grid[size_t(x)][size_t(y)];
            if (!V) continue;
            double d = safe_delta(*V, fixed);
            if (std::isfinite(d)) out.push_back({x, y, d});
        }
    return out;
}

std::string delta_map_csv(const std::vector<DeltaCell>& cells) {
    std::ostringstream os;
    os << "x,y,delta\n";
    os.precision(10);
    for (const auto& c : cells) os << c.x << "," << c.y << "," << c.delta << "\n";
    return os.str();
}

std::string OptimizeResult::json() const {
    nlohmann::json j;
    j["path"] = path;
    j["direction"] = direction;
    std::vector<nlohmann::json> f;
    for (double v : fit) f.push_back(num(v));
    j["fit"] = f;
    std::vector<nlohmann::json> pd;
    for (double v : path_delta) pd.push_back(num(v));
    j["path_delta"] = pd;
    j["report"] = nlohmann::json::parse(report.json());
    return j.dump();
}

namespace {

// Small-integer direction closest to the slope pair (a, b).
std::vector<long> rational_direction(double a, double b, long max_component) {
    if (a < 0) a = 0;
    if (b < 0) b = 0;
    if (a == 0 && b == 0) return {1, 1};
    double angle = std::atan2(b, a);
    std::vector<long> best{1, 1};
    double best_err = std::numeric_limits<double>::infinity();
    for (long i = 0; i <= max_component; ++i)
        for (long j = 0; j <= max_component; ++j) {
            if ((i == 0 && j == 0) || std::gcd(i, j) != 1) continue;
            double err = std::fabs(std::atan2(double(j), double(i)) - angle);
            if (err < best_err - 1e-12) {
                best_err = err;
                best = {i, j};
            }
        }
    return best;
}

}  // namespace

OptimizeResult optimize_greedy(const MatrixField& field, const TargetFn& L, long horizon, long tail_steps) {
    require_2d(field);
    if (horizon < 1) throw Error(RM_ERR_INVALID_ARGUMENT, "horizon must be positive");
    OptimizeResult res;
    long pos[2] = {1, 1};
    IntMat V = field.initial;
    for (long n = 1; n <= horizon; ++n) {
        double best = -std::numeric_limits<double>::infinity();
        int best_axis = -1;
        IntMat best_V;
        bool any_regular = false;
        for (int axis = 0; axis < 2; ++axis) {
            IntMat M = field_at(field, size_t(axis), pos[0], pos[1]);
            if (singular(M)) continue;
            any_regular = true;
            IntMat W = V;
            mul_into(W, M);
            W = divide_content(W);
            double d = safe_delta(W, L);
            if (std::isfinite(d) && d > best) {
                best = d;
                best_axis = axis;
                best_V = W;
            }
        }
        if (!any_regular) throw Error(RM_ERR_STUCK, "every neighbouring step is singular");
        if (best_axis < 0) break;
        V = best_V;
        ++pos[best_axis];
        res.path.push_back({pos[0], pos[1]});
        res.path_delta.push_back(best);
    }
    if (res.path.empty()) {
        res.report.method = "Empirical";
        res.report.delta = res.report.delta_std = kNaN;
        return res;
    }
    long dx = res.path.back()[0] - 1, dy = res.path.back()[1] - 1;
    res.direction = rational_direction(double(dx), double(dy), 8);
    Trajectory traj = diagonal(2);
    traj.direction = res.direction;
    res.report = delta_empirical(field, traj, L, std::max(32L, tail_steps / (res.direction[0] + res.direction[1])));
    return res;
}


OptimizeResult optimize_lls(const MatrixField& field, const TargetFn& L, long horizon, long tail_steps) {
    require_2d(field);
    if (horizon < 2) throw Error(RM_ERR_INVALID_ARGUMENT, "horizon must be at least 2");
    auto grid = potential_grid(field, horizon + 1, horizon + 1, horizon);
    TargetFn fixed = pinned(L, grid);
    OptimizeResult res;
    std::vector<double> ns, xs, ys;
    for (long n = 0; n <= horizon; ++n) {
        double best = -std::numeric_limits<double>::infinity();
        long bx = -1, by = -1;
        for (long x = 1; x <= n + 1; ++x) {
            long y = n + 2 - x;
            const auto& V = grid[size_t(x)][size_t(y)];
            if (!V) continue;
            double d = safe_delta(*V, fixed);
            if (std::isfinite(d) && d > best) {
                best = d;
                bx = x;
                by = y;
            }
        }
        if (bx < 0) continue;
        res.path.push_back({bx, by});
        res.path_delta.push_back(best);
        ns.push_back(double(n));
        xs.push_back(double(bx));
        ys.push_back(double(by));
    }
    if (ns.size() < 2) throw Error(RM_ERR_INSUFFICIENT_PRECISION, "too few finite cells to fit a trajectory");
    double ax = ls_slope(ns, xs), ay = ls_slope(ns, ys);
    res.fit = {ax, ay};
    res.direction = rational_direction(ax, ay, 8);
    Trajectory traj = diagonal(2);
    traj.direction = res.direction;
    long cells = std::max(32L, tail_steps / (res.direction[0] + res.direction[1]));
    res.report = delta_empirical(field, traj, L, cells);
    return res;
}

std::map<int, BigRational> combination_coefficients(int target, const std::map<int, long>& R) {
    if (target < 2) throw Error(RM_ERR_INVALID_ARGUMENT, "target must be at least 2");
    std::map<int, std::vector<BigRational>> rep;
    for (int s = 2; s <= target; ++s) {
        auto it = R.find(s);
        if (it == R.end()) continue;
        if (it->second < 0) throw Error(RM_ERR_INVALID_ARGUMENT, "R must be non-negative");
        rep[s] = hat_zeta_symbolic(s, it->second);
    }
    if (!rep.count(target)) throw Error(RM_ERR_SINGULAR_SYSTEM, "no component carries zeta(" + std::to_string(target) + ")");
    std::vector<BigRational> acc(size_t(target + 1), BigRational(0));
    std::map<int, BigRational> c;
    for (int s = target; s >= 2; --s) {
        BigRational need = (s == target ? BigRational(1) : BigRational(0)) - acc[size_t(s)];
        auto it = rep.find(s);
        if (it == rep.end()) {
            if (need != 0) throw Error(RM_ERR_SINGULAR_SYSTEM, "zeta(" + std::to_string(s) + ") cannot be cancelled");
            continue;
        }
        const auto& v = it->second;
        if (v[size_t(s)] == 0) throw Error(RM_ERR_SINGULAR_SYSTEM, "zero pivot");
        BigRational cs = need / v[size_t(s)];
        c[s] = cs;
        for (size_t k = 0; k < v.size() && k < acc.size(); ++k) acc[k] += cs * v[k];
    }
    c[0] = -acc[0];
    return c;
}

std::string CombinationPlan::json() const {
    nlohmann::json j;
    j["target"] = "zeta" + std::to_string(target);
    nlohmann::json r, c;
    for (auto& [s, v] : R) r[std::to_string(s)] = v;
    for (auto& [s, v] : coeffs) c[s == 0 ? "c0" : "c" + std::to_string(s)] = v.get_str();
    j["R"] = r;
    j["coefficients"] = c;
    j["mode"] = mode;
    j["lattice_direction"] = lattice_dir;
    j["check_digits"] = check_digits;
    j["report"] = nlohmann::json::parse(report.json());
    return j.dump();
}

namespace {

Pcf zeta_hat_pcf(int s, long R) {
    return make_family_pcf("zeta_hat", "{\"s\":" + std::to_string(s) + ",\"R\":" + std::to_string(R) + "}");
}

// c_0 + sum c_s q_s/p_s at depth n, as a reduced rational.
BigRational assemble(const std::map<int, BigRational>& c, const std::map<int, long>& R, long n) {
    BigRational x = c.at(0);
    for (auto& [s, cs] : c) {
        if (s == 0 || cs == 0) continue;
        ConvergentState st = advance_to(zeta_hat_pcf(s, R.at(s)), n);
        if (st.p == 0) throw Error(RM_ERR_ZERO_DENOMINATOR, "component convergent vanished");
        BigRational term(st.q, st.p);
        term.canonicalize();
        x += cs * term;
    }
    return x;
}

}  // namespace

CombinationPlan zeta_combination(int target, const std::map<int, long>& R, long depth, const std::string& mode,
                                 const std::vector<long>& dir) {
    if (depth < 2) throw Error(RM_ERR_INVALID_ARGUMENT, "depth must be at least 2");
    if (mode != "fixed" && mode != "lattice" && mode != "search")
        throw Error(RM_ERR_INVALID_ARGUMENT, "mode must be fixed, lattice or search");
    if (dir.size() != 2 || dir[0] < 0 || dir[1] < 1) throw Error(RM_ERR_INVALID_ARGUMENT, "bad lattice direction");
    CombinationPlan plan;
    plan.target = target;
    plan.R = R;
    plan.mode = mode;
    plan.lattice_dir = dir;
    plan.coeffs = combination_coefficients(target, R);

    long check = 200;
    HPDecimal sum(check + 10, plan.coeffs.at(0));
    for (auto& [s, cs] : plan.coeffs)
        if (s != 0 && cs != 0) sum += HPDecimal(check + 10, cs) * hat_zeta(s, R.at(s), check + 10);
    std::string zname = "zeta" + std::to_string(target);
    HPDecimal zt = get_constant(zname, check + 10);
    plan.check_digits = agreement_digits(sum, zt, check);

    auto zeta_target = cached([zname](long d) { return get_constant(zname, d); });
    if (mode == "fixed") {
        std::vector<std::tuple<long, BigInt, BigInt>> seq;
        for (long n : backoff_schedule(depth, true, std::min(32L, depth), 16)) {
            BigRational x = assemble(plan.coeffs, R, n);
            seq.emplace_back(n, x.get_num(), x.get_den());
        }
        plan.report = delta_sequence(seq, zeta_target);
    } else {
        auto run = [&](const std::vector<long>& d) {
            std::vector<std::tuple<long, BigInt, BigInt>> seq;
            for (long t = std::max(1L, depth / 2); t <= depth; ++t) {
                std::map<int, long> Rt;
                for (auto& [s, v] : R) Rt[s] = v + (t - 1) * d[0];
                auto c = combination_coefficients(target, Rt);
                BigRational x = assemble(c, Rt, t * d[1]);
                seq.emplace_back(t, x.get_num(), x.get_den());
            }
            return delta_sequence(seq, zeta_target);
        };
        if (mode == "lattice") {
            plan.report = run(dir);
        } else {
            bool first = true;
            for (const auto& d : std::vector<std::vector<long>>{{1, 1}, {2, 1}, {1, 2}, {3, 1}, {1, 3}, {3, 2}, {2, 3}}) {
                DeltaReport r = run(d);
                if (first || r.delta > plan.report.delta) {
                    plan.report = r;
                    plan.lattice_dir = d;
                    first = false;
                }
            }
        }
    }
    plan.report.steps = depth;
    return plan;
}

}  // namespace rm
