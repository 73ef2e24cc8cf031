#include "rm/field.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "rm/error.hpp"

namespace rm {

namespace {

using RatMatP = Mat2<RatPolynomial>;

const std::vector<std::string> kXY{"x", "y"};
const std::vector<std::string> kXYZW{"x", "y", "z", "w"};
const std::vector<std::string> kN{"n"};

PolyMat pm(const std::vector<std::string>& vars, const char* a, const char* b, const char* c, const char* d) {
    return PolyMat(parse_poly(a, vars), parse_poly(b, vars), parse_poly(c, vars), parse_poly(d, vars));
}

BigInt lcm_den(const RatPolynomial& p, BigInt acc) {
    for (const auto& [e, c] : p.terms()) mpz_lcm(acc.get_mpz_t(), acc.get_mpz_t(), c.get_den_mpz_t());
    return acc;
}

IntPolynomial to_int_scaled(const RatPolynomial& p, const BigRational& k) {
    IntPolynomial out(p.vars());
    for (const auto& [e, c] : p.terms()) {
        BigRational v = c * k;
        if (v.get_den() != 1) throw Error(RM_ERR_INTERNAL, "non-integral coefficient after scaling");
        out.add_term(e, v.get_num());
    }
    return out;
}

// Joint denominator clearing of a rational polynomial matrix.
PolyMat rat_mat_to_int(const RatMatP& M, BigInt* scale = nullptr) {
    BigInt l = 1;
    for (const auto& e : M.m) l = lcm_den(e, l);
    if (scale) *scale = l;
    BigRational k(l);
    return PolyMat(to_int_scaled(M.m[0], k), to_int_scaled(M.m[1], k), to_int_scaled(M.m[2], k),
                   to_int_scaled(M.m[3], k));
}

RatMatP to_rat_mat(const PolyMat& M) {
    return RatMatP(to_rational(M.m[0]), to_rational(M.m[1]), to_rational(M.m[2]), to_rational(M.m[3]));
}

RatMatP rat_mat_subs(const RatMatP& M, const std::vector<RatPolynomial>& subs) {
    return RatMatP(M.m[0].substitute(subs), M.m[1].substitute(subs), M.m[2].substitute(subs), M.m[3].substitute(subs));
}

BigRational parse_rational(const std::string& s) {
    BigRational q;
    std::string t = s;
    t.erase(std::remove_if(t.begin(), t.end(), ::isspace), t.end());
    if (t.empty() || q.set_str(t, 10) != 0) throw Error(RM_ERR_SYNTAX, "bad rational '" + s + "'");
    q.canonicalize();
    return q;
}

BigRational json_rational(const nlohmann::json& j) {
    if (j.is_number_integer()) return BigRational(j.get<long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw Error(RM_ERR_INVALID_ARGUMENT, "expected an integer or a rational string");
}

MatrixField zeta2_4d(const BigRational& C) {
    if (C == 0) throw Error(RM_ERR_DEGENERATE_PARAMS, "C must be nonzero");
    BigInt p = C.get_num(), q = C.get_den();
    auto& v = kXYZW;
    IntPolynomial e2 = parse_poly("x*y+x*z+x*w+y*z+y*w+z*w", v), x2 = parse_poly("x^2", v), prod = parse_poly("x*y*z*w", v);
    // q^2 * M so the entries are integral.
    PolyMat M((e2 + x2).scaled(p * q), IntPolynomial::constant(v, -q * q), prod.scaled(p * p), x2.scaled(p * q));
    MatrixField f;
    f.vars = v;
    for (size_t r = 0; r < 4; ++r) {
        std::vector<IntPolynomial> subs;
        for (size_t i = 0; i < 4; ++i) subs.push_back(IntPolynomial::variable(v, (i + r) % 4));
        f.mats.push_back(poly_mat_map(M, subs));
    }
    return f;
}

std::vector<long> integer_roots(const IntPolynomial& p, long limit) {
    std::vector<long> roots;
    if (p.is_zero()) return roots;
    auto d = dense_coeffs(p);
    for (long n = 0; n <= limit; ++n)
        if (eval_at(d, n) == 0) roots.push_back(n);
    return roots;
}

// Null vector of a rank-3 system with 4 unknowns, exact.
std::optional<std::vector<BigRational>> nullspace4(std::vector<std::vector<BigRational>> rows) {
    const int n = 4;
    std::vector<int> pivcol;
    size_t r = 0;
    for (int c = 0; c < n && r < rows.size(); ++c) {
        size_t p = r;
        while (p < rows.size() && rows[p][c] == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        BigRational inv = 1 / rows[r][c];
        for (auto& x : rows[r]) x *= inv;
        for (size_t k = 0; k < rows.size(); ++k) {
            if (k == r || rows[k][c] == 0) continue;
            BigRational f = rows[k][c];
            for (int j = 0; j < n; ++j) rows[k][j] -= f * rows[r][j];
        }
        pivcol.push_back(c);
        ++r;
    }
    if (pivcol.size() != 3) return std::nullopt;
    int free = 0;
    while (std::find(pivcol.begin(), pivcol.end(), free) != pivcol.end()) ++free;
    std::vector<BigRational> v(n, BigRational(0));
    v[free] = 1;
    for (size_t k = 0; k < pivcol.size(); ++k) v[pivcol[k]] = -rows[k][free];
    return v;
}

}  // namespace

std::string MatrixField::json() const {
    nlohmann::json j;
    j["dimension"] = dimension();
    j["vars"] = vars;
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& M : mats) ms.push_back({M.m[0].str(), M.m[1].str(), M.m[2].str(), M.m[3].str()});
    j["matrices"] = ms;
    if (initial != identity_int())
        j["initial"] = {initial.m[0].get_str(), initial.m[1].get_str(), initial.m[2].get_str(), initial.m[3].get_str()};
    return j.dump();
}

MatrixField MatrixField::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(RM_ERR_SYNTAX, std::string("field JSON: ") + e.what());
    }
    MatrixField f;
    try {
        f.vars = j.at("vars").get<std::vector<std::string>>();
        for (const auto& m : j.at("matrices")) {
            auto e = m.get<std::vector<std::string>>();
            if (e.size() != 4) throw Error(RM_ERR_ARITY, "each matrix needs 4 entries");
            f.mats.push_back(PolyMat(parse_poly(e[0], f.vars), parse_poly(e[1], f.vars), parse_poly(e[2], f.vars),
                                     parse_poly(e[3], f.vars)));
        }
        if (j.contains("initial")) {
            std::vector<BigInt> v;
            for (const auto& x : j["initial"]) v.push_back(x.is_string() ? BigInt(x.get<std::string>()) : BigInt(x.get<long>()));
            if (v.size() != 4) throw Error(RM_ERR_ARITY, "initial needs 4 entries");
            f.initial = IntMat(v[0], v[1], v[2], v[3]);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(RM_ERR_SYNTAX, std::string("field JSON: ") + e.what());
    }
    if (j.contains("dimension") && j["dimension"].get<size_t>() != f.mats.size())
        throw Error(RM_ERR_ARITY, "dimension does not match the number of matrices");
    if (f.mats.size() != f.vars.size()) throw Error(RM_ERR_ARITY, "one matrix per variable required");
    return f;
}

std::vector<std::string> catalog_field_names() { return {"zeta3", "e", "pi", "zeta2", "zeta2_4d", "zeta2_4d(C)"}; }

MatrixField catalog_field(const std::string& name) {
    MatrixField f;
    f.vars = kXY;
    if (name == "zeta3") {
        f.mats = {pm(kXY, "0", "-x^6", "1", "x^3+(x+1)^3+2*y*(y-1)*(2*x+1)"),
                  pm(kXY, "-(x-y)*(x^2-x*y+y^2)", "-x^6", "1", "(x+y)*(x^2+x*y+y^2)")};
        f.initial = IntMat(1, 1, 0, 1);
    } else if (name == "e") {
        f.mats = {pm(kXY, "0", "x+1", "1", "-(x+y+1)"), pm(kXY, "-1", "x+1", "1", "-(x+y+2)")};
    } else if (name == "pi") {
        f.mats = {pm(kXY, "0", "-(2*x+1)*x", "1", "y+3*x+2"), pm(kXY, "y-x", "-(2*x+1)*x", "1", "2*x+2*y+1")};
    } else if (name == "zeta2") {
        f.mats = {pm(kXY, "0", "-x^2", "(x+1)^2", "x^2+(x+1)^2+y*(y-1)"),
                  pm(kXY, "-2*x^2+2*x*y-y^2", "-2*x^2", "2*x^2", "2*x^2+2*x*y+y^2")};
    } else if (name == "zeta2_4d") {
        return zeta2_4d(1);
    } else {
        static const std::regex re(R"(zeta2_4d\(\s*(-?\d+(?:/\d+)?)\s*\))");
        std::smatch m;
        if (std::regex_match(name, m, re)) return zeta2_4d(parse_rational(m[1]));
        throw Error(RM_ERR_UNKNOWN_FIELD, "unknown field '" + name + "'");
    }
    return f;
}

MatrixField load_field(const std::string& spec) {
    try {
        return catalog_field(spec);
    } catch (const Error& e) {
        if (e.code() != RM_ERR_UNKNOWN_FIELD) throw;
    }
    if (!spec.empty() && spec.front() == '{') return MatrixField::from_json(spec);
    std::ifstream in(spec);
    if (!in) throw Error(RM_ERR_UNKNOWN_FIELD, "unknown field '" + spec + "' (not a catalog name or readable file)");
    std::stringstream ss;
    ss << in.rdbuf();
    return MatrixField::from_json(ss.str());
}

std::string CocycleReport::json() const {
    nlohmann::json j;
    j["pass"] = pass;
    j["points_checked"] = points_checked;
    if (violation) {
        auto mat = [](const IntMat& M) {
            return std::vector<std::string>{M.m[0].get_str(), M.m[1].get_str(), M.m[2].get_str(), M.m[3].get_str()};
        };
        j["violation"] = {{"pair", {violation->i, violation->j}},
                          {"point", violation->point},
                          {"lhs", mat(violation->lhs)},
                          {"rhs", mat(violation->rhs)}};
    }
    return j.dump();
}

CocycleReport cocycle_check(const MatrixField& field, long grid_max) {
    if (grid_max < 2) throw Error(RM_ERR_INVALID_ARGUMENT, "grid must be at least 2");
    const size_t d = field.dimension();
    const long side = grid_max + 1;  // coordinates 1..grid_max+1
    size_t total = 1;
    for (size_t i = 0; i < d; ++i) total *= static_cast<size_t>(side);
    std::vector<std::vector<IntMat>> vals(total);
    std::vector<BigInt> pt(d);
    std::vector<long> coord(d, 1);
    for (size_t idx = 0; idx < total; ++idx) {
        size_t t = idx;
        for (size_t i = 0; i < d; ++i) {
            coord[i] = static_cast<long>(t % side) + 1;
            t /= side;
            pt[i] = coord[i];
        }
        for (const auto& M : field.mats) vals[idx].push_back(eval_int(M, pt));
    }
    std::vector<size_t> stride(d, 1);
    for (size_t i = 1; i < d; ++i) stride[i] = stride[i - 1] * side;
    CocycleReport rep;
    for (size_t idx = 0; idx < total; ++idx) {
        size_t t = idx;
        bool inside = true;
        for (size_t i = 0; i < d; ++i) {
            coord[i] = static_cast<long>(t % side) + 1;
            t /= side;
            if (coord[i] > grid_max) inside = false;
        }
        if (!inside) continue;
        ++rep.points_checked;
        for (size_t i = 0; i < d; ++i)
            for (size_t j = i + 1; j < d; ++j) {
                IntMat lhs = vals[idx][i] * vals[idx + stride[i]][j];
                IntMat rhs = vals[idx][j] * vals[idx + stride[j]][i];
                if (lhs != rhs) {
                    rep.pass = false;
                    rep.violation = CocycleViolation{i, j, coord, lhs, rhs};
                    return rep;
                }
            }
    }
    return rep;
}

Trajectory diagonal(size_t dim) {
    return Trajectory{std::vector<BigRational>(dim, BigRational(1)), std::vector<long>(dim, 1)};
}

Trajectory parse_trajectory(const std::string& start, const std::string& dir, size_t dim) {
    Trajectory t = diagonal(dim);
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(item);
        return out;
    };
    if (!start.empty()) {
        auto parts = split(start);
        if (parts.size() != dim) throw Error(RM_ERR_ARITY, "start needs " + std::to_string(dim) + " coordinates");
        for (size_t i = 0; i < dim; ++i) t.start[i] = parse_rational(parts[i]);
    }
    if (!dir.empty()) {
        auto parts = split(dir);
        if (parts.size() != dim) throw Error(RM_ERR_ARITY, "direction needs " + std::to_string(dim) + " components");
        for (size_t i = 0; i < dim; ++i) {
            try {
                t.direction[i] = std::stol(parts[i]);
            } catch (const std::exception&) {
                throw Error(RM_ERR_SYNTAX, "bad direction component '" + parts[i] + "'");
            }
        }
    }
    return t;
}

Walker::Walker(const MatrixField& field, const Trajectory& traj, bool track_g)
    : field_(field), traj_(traj), track_g_(track_g) {
    const size_t d = field.dimension();
    if (traj.start.size() != d || traj.direction.size() != d)
        throw Error(RM_ERR_ARITY, "trajectory dimension does not match the field");
    bool any = false;
    for (long v : traj.direction) {
        if (v < 0) throw Error(RM_ERR_INVALID_ARGUMENT, "direction components must be nonnegative");
        any = any || v > 0;
    }
    if (!any) throw Error(RM_ERR_INVALID_ARGUMENT, "direction must be nonzero");
    integral_ = true;
    for (const auto& s : traj.start) {
        if (s <= 0) throw Error(RM_ERR_NON_POSITIVE, "start coordinates must be positive");
        if (s.get_den() != 1) integral_ = false;
    }
    s_.position = traj.start;
    BigInt g;
    s_.V = divide_content(field.initial, &g);
    s_.g = BigRational(g);
}

IntMat Walker::eval_at_position(size_t axis, BigRational* scale) const {
    const PolyMat& M = field_.mats[axis];
    if (integral_) {
        std::vector<BigInt> pt;
        for (const auto& c : s_.position) pt.push_back(c.get_num());
        *scale = 1;
        return eval_int(M, pt);
    }
    RatMat R(M.m[0].eval(s_.position), M.m[1].eval(s_.position), M.m[2].eval(s_.position), M.m[3].eval(s_.position));
    BigInt l = 1;
    for (const auto& e : R.m) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.get_den_mpz_t());
    *scale = BigRational(l);
    IntMat out;
    for (size_t i = 0; i < 4; ++i) out.m[i] = BigRational(R.m[i] * l).get_num();
    return out;
}

void Walker::advance_axis(size_t axis) {
    BigRational scale;
    IntMat M = eval_at_position(axis, &scale);
    if (M.det() == 0) {
        std::string where;
        for (const auto& c : s_.position) where += (where.empty() ? "" : ",") + c.get_str();
        throw Error(RM_ERR_SINGULAR_STEP, "singular step matrix at (" + where + ")");
    }
    mul_into(s_.V, M);
    BigInt c;
    s_.V = divide_content(s_.V, &c);
    if (track_g_) {
        s_.g *= BigRational(c) / scale;
    }
    s_.position[axis] += 1;
}

void Walker::advance() {
    for (size_t i = 0; i < traj_.direction.size(); ++i)
        for (long k = 0; k < traj_.direction[i]; ++k) advance_axis(i);
    ++s_.step;
}

std::vector<PotentialState> walk(const MatrixField& field, const Trajectory& traj, const std::vector<long>& samples) {
    Walker w(field, traj, true);
    std::vector<PotentialState> out;
    for (long target : samples) {
        while (w.state().step < target) w.advance();
        out.push_back(w.state());
    }
    return out;
}

HPDecimal right_ratio(const IntMat& V, long digits) {
    if (V(1, 1) == 0) throw Error(RM_ERR_ZERO_DENOMINATOR, "zero denominator in the potential");
    return HPDecimal::ratio(V(0, 1), V(1, 1), digits);
}

PrecisionReport traj_limit(const MatrixField& field, const Trajectory& traj, long steps, long digits, long margin) {
    if (steps < 1 || digits < 1) throw Error(RM_ERR_INVALID_ARGUMENT, "steps and digits must be positive");
    long w = digits + margin + 10;
    Walker walker(field, traj, false);
    PrecisionReport rep;
    rep.method = "walk";
    std::optional<HPDecimal> prev;
    long K = -1;
    for (long n : backoff_schedule(steps)) {
        while (walker.state().step < n) walker.advance();
        const IntMat& V = walker.state().V;
        if (V(1, 1) == 0) continue;
        HPDecimal cur = right_ratio(V, w);
        if (prev) {
            K = shared_digits(*prev, cur, w - 5);
            rep.history.emplace_back(n, K);
        }
        prev = cur;
        rep.depth = n;
        rep.value = cur;
        rep.digits = K;
        if (K >= digits + margin) break;
    }
    if (!prev) throw Error(RM_ERR_DIVERGENCE, "no finite ratio along the walk");
    if (K < 0) throw Error(RM_ERR_DIVERGENCE, "consecutive samples disagree in the integer part");
    return rep;
}

MatrixField shift_field(const MatrixField& field, const std::vector<BigRational>& shifts) {
    if (shifts.size() != field.dimension()) throw Error(RM_ERR_ARITY, "one shift per axis required");
    std::vector<RatPolynomial> subs;
    for (size_t i = 0; i < field.vars.size(); ++i)
        subs.push_back(RatPolynomial::variable(field.vars, i) + RatPolynomial::constant(field.vars, shifts[i]));
    MatrixField out;
    out.vars = field.vars;
    out.initial = field.initial;
    for (const auto& M : field.mats) out.mats.push_back(rat_mat_to_int(rat_mat_subs(to_rat_mat(M), subs)));
    return out;
}

PolyMat parse_poly_mat(const std::string& text, const std::vector<std::string>& vars) {
    std::vector<std::string> e;
    try {
        e = nlohmann::json::parse(text).get<std::vector<std::string>>();
    } catch (const std::exception&) {
        throw Error(RM_ERR_SYNTAX, "matrix must be a JSON list of 4 polynomial texts");
    }
    if (e.size() != 4) throw Error(RM_ERR_ARITY, "matrix needs 4 entries");
    return PolyMat(parse_poly(e[0], vars), parse_poly(e[1], vars), parse_poly(e[2], vars), parse_poly(e[3], vars));
}

MatrixField coboundary(const MatrixField& field, const PolyMat& U) {
    IntPolynomial det = U.det();
    if (det.is_zero()) throw Error(RM_ERR_SINGULAR_U, "det U is identically zero");
    RatPolynomial rdet = to_rational(det);
    PolyMat adj = U.adjugate();
    MatrixField out;
    out.vars = field.vars;
    out.initial = field.initial;
    for (size_t s = 0; s < field.dimension(); ++s) {
        PolyMat Us = poly_mat_map(U, [&] {
            std::vector<IntPolynomial> subs;
            for (size_t i = 0; i < field.vars.size(); ++i) {
                IntPolynomial v = IntPolynomial::variable(field.vars, i);
                if (i == s) v += IntPolynomial::constant(field.vars, 1);
                subs.push_back(v);
            }
            return subs;
        }());
        PolyMat N = adj * field.mats[s] * Us;
        RatMatP Q;
        for (size_t k = 0; k < 4; ++k) {
            auto q = divide_exact(to_rational(N.m[k]), rdet);
            if (!q) throw Error(RM_ERR_NOT_POLYNOMIAL, "U^-1 M U(shifted) is not polynomial for axis " + field.vars[s]);
            Q.m[k] = *q;
        }
        out.mats.push_back(rat_mat_to_int(Q));
    }
    if (out.dimension() >= 2) {
        CocycleReport r = cocycle_check(out, out.dimension() > 2 ? 6 : 10);
        if (!r.pass) throw Error(RM_ERR_CONDITION_VIOLATED, "cocycle lost under coboundary: " + r.json());
    }
    return out;
}

PolyMat unit_cell(const MatrixField& field, const Trajectory& traj) {
    const size_t d = field.dimension();
    if (traj.start.size() != d || traj.direction.size() != d) throw Error(RM_ERR_ARITY, "trajectory dimension mismatch");
    RatPolynomial n = RatPolynomial::variable(kN, 0);
    std::vector<RatPolynomial> pos;
    for (size_t i = 0; i < d; ++i)
        pos.push_back(RatPolynomial::constant(kN, traj.start[i] - traj.direction[i]) + n.scaled(BigRational(traj.direction[i])));
    PolyMat cell(IntPolynomial::constant(kN, 1), IntPolynomial(kN), IntPolynomial(kN), IntPolynomial::constant(kN, 1));
    for (size_t i = 0; i < d; ++i)
        for (long k = 0; k < traj.direction[i]; ++k) {
            cell = cell * rat_mat_to_int(rat_mat_subs(to_rat_mat(field.mats[i]), pos));
            pos[i] += RatPolynomial::constant(kN, 1);
        }
    return cell;
}

PolyMat balanced(const PolyMat& cell, IntPolynomial* content_out) {
    IntPolynomial g(kN);
    for (const auto& e : cell.m)
        if (!e.is_zero()) g = g.is_zero() ? e : gcd_univariate(g, e);
    if (g.is_zero()) throw Error(RM_ERR_SINGULAR_STEP, "zero unit cell");
    PolyMat out = cell;
    for (auto& e : out.m) {
        if (e.is_zero()) continue;
        auto q = div_univariate(e, g);
        if (!q) throw Error(RM_ERR_INTERNAL, "content does not divide an entry");
        e = *q;
    }
    BigInt k = poly_mat_content(out);
    if (k > 1) {
        for (auto& e : out.m) e = exact_div(e, k);
        g = g.scaled(k);
    }
    if (content_out) *content_out = g;
    return out;
}

std::pair<BigInt, BigInt> left_column(const MatrixField& field, const Trajectory& traj, long cells) {
    Walker w(field, traj, false);
    while (w.state().step < cells) w.advance();
    return {w.state().V(0, 0), w.state().V(1, 0)};
}

std::string PcfConversion::json() const {
    nlohmann::json j;
    j["a"] = pcf.a().str();
    j["b"] = pcf.b().str();
    j["offset"] = offset;
    j["mobius"] = {mobius.m[0].get_str(), mobius.m[1].get_str(), mobius.m[2].get_str(), mobius.m[3].get_str()};
    j["cell_content"] = cell_content.str();
    j["pivot"] = swapped ? "m12" : "m21";
    j["verified_steps"] = verified_steps;
    return j.dump();
}

PcfConversion cmf_to_pcf(const MatrixField& field, const Trajectory& traj) {
    PcfConversion conv{Pcf(IntPolynomial::variable(kN, 0), IntPolynomial::constant(kN, 1)), 0, identity_int(),
                       IntPolynomial(kN), false, 0};
    PolyMat cell = unit_cell(field, traj);
    PolyMat B = balanced(cell, &conv.cell_content);
    if (B.m[2].is_zero()) {
        if (B.m[1].is_zero()) throw Error(RM_ERR_ELIMINATION_DEGENERATE, "unit cell is triangular in both pivots");
        B = PolyMat(B.m[3], B.m[2], B.m[1], B.m[0]);
        conv.swapped = true;
    }
    auto sh = [](const IntPolynomial& p, long k) { return p.shifted(0, BigInt(k)); };
    const IntPolynomial &m11 = B.m[0], &m21 = B.m[2], &m22 = B.m[3];
    IntPolynomial det = B.det();
    if (det.is_zero()) throw Error(RM_ERR_SINGULAR_STEP, "unit cell determinant is identically zero");
    IntPolynomial a = m21 * sh(m11, 1) + m22 * sh(m21, 1);
    IntPolynomial b = -(sh(m21, -1) * sh(m21, 1) * det);
    std::vector<IntPolynomial> hs;
    for (int iter = 0; iter < 8; ++iter) {
        IntPolynomial h = a.is_zero() ? gcd_univariate(b, sh(b, 1)) : gcd_univariate(a, gcd_univariate(b, sh(b, 1)));
        if (h.total_degree() == 0) break;
        auto qa = a.is_zero() ? std::optional<IntPolynomial>(a) : div_univariate(a, h);
        auto qb = div_univariate(b, h * sh(h, -1));
        if (!qa || !qb) break;
        a = *qa;
        b = *qb;
        hs.push_back(h);
    }
    {
        BigInt ca = a.is_zero() ? BigInt(0) : content(a), cb = content(b);
        BigInt k = gcd(ca, cb);
        while (k > 1 && cb % (k * k) != 0) k = gcd(k, cb / k);
        if (k > 1) {
            if (!a.is_zero()) a = exact_div(a, k);
            b = exact_div(b, k * k);
        }
    }
    if (!a.is_zero() && a.terms().begin()->second < 0) a = -a;

    long limit = 2000;
    long offset = 0;
    for (const IntPolynomial* p : std::initializer_list<const IntPolynomial*>{&m21, &b})
        for (long r : integer_roots(*p, limit)) offset = std::max(offset, r);
    for (const auto& h : hs)
        for (long r : integer_roots(h, limit)) offset = std::max(offset, r);

    const long verify = 50;
    for (int attempt = 0; attempt < 4; ++attempt, ++offset) {
        Pcf pcf(sh(a, offset), sh(b, offset));
        // Walk data: left column (right column when pivoted) after n + 1 + offset cells.
        Walker w(field, traj, false);
        std::vector<std::pair<BigInt, BigInt>> u;
        int col = conv.swapped ? 1 : 0;
        while (w.state().step < offset + 1) w.advance();
        ConvergentState st = initial_state(pcf);
        std::vector<std::pair<BigInt, BigInt>> pq;
        for (long n = 0; n <= verify; ++n) {
            u.emplace_back(w.state().V(0, col), w.state().V(1, col));
            pq.emplace_back(st.p, st.q);
            w.advance();
            step_in_place(st, pcf);
        }
        std::vector<std::vector<BigRational>> rows;
        std::optional<std::vector<BigRational>> T;
        for (long n = 0; n <= verify && !T; ++n) {
            const auto& [p, q] = pq[n];
            const auto& [u0, u1] = u[n];
            rows.push_back({BigRational(p * u1), BigRational(q * u1), BigRational(-p * u0), BigRational(-q * u0)});
            if (rows.size() >= 3) T = nullspace4(rows);
        }
        if (!T) continue;
        BigInt l = 1;
        for (auto& x : *T) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
        std::vector<BigInt> t;
        for (auto& x : *T) t.push_back(BigRational(x * l).get_num());
        BigInt g = 0;
        for (auto& x : t) g = gcd(g, x);
        for (auto& x : t) x /= g;
        IntMat M(t[0], t[1], t[2], t[3]);
        if (M.det() == 0) continue;
        long ok = 0;
        for (long n = 0; n <= verify; ++n) {
            const auto& [p, q] = pq[n];
            const auto& [u0, u1] = u[n];
            if ((M(0, 0) * p + M(0, 1) * q) * u1 != (M(1, 0) * p + M(1, 1) * q) * u0) break;
            ++ok;
        }
        if (ok <= verify) continue;
        conv.pcf = pcf;
        conv.offset = offset;
        conv.mobius = M;
        conv.verified_steps = ok;
        return conv;
    }
    throw Error(RM_ERR_ELIMINATION_DEGENERATE, "no Mobius prefix relates the Pcf to the walk");
}

std::string Construction::json() const {
    nlohmann::json j = nlohmann::json::parse(field.json());
    j["f"] = f.str();
    j["fbar"] = fbar.str();
    j["linear_condition"] = linear_ok;
    j["quadratic_condition"] = quadratic_ok;
    j["cocycle"] = cocycle_ok;
    return j.dump();
}

Construction construct(const ConstructionParams& params) {
    const auto& c = params.c;
    auto X = RatPolynomial::variable(kXY, 0), Y = RatPolynomial::variable(kXY, 1);
    auto K = [](const BigRational& v) { return RatPolynomial::constant(kXY, v); };
    RatPolynomial f(kXY), fb(kXY);
    if (params.degree == 1 || params.degree == 2) {
        if (c.size() != 4) throw Error(RM_ERR_ARITY, "degrees 1 and 2 take 4 coefficients");
        if (params.degree == 1) {
            f = K(c[0]) + (X + Y).scaled(c[1]);
            fb = K(c[2]) + (X - Y).scaled(c[3]);
        } else {
            BigRational u = 2 * c[1] + c[2], v = c[1] + c[2];
            RatPolynomial q = (X * X).scaled(2) + (X * Y).scaled(2) + Y * Y;
            RatPolynomial qb = (X * X).scaled(2) - (X * Y).scaled(2) + Y * Y;
            f = K(u * v - c[3] * c[0]) - ((X + Y).scaled(u) + (X.scaled(2) + Y).scaled(v)).scaled(c[3]) + q.scaled(c[3] * c[3]);
            fb = (K(c[0]) + X.scaled(c[2]) + Y.scaled(c[1]) - qb.scaled(c[3])).scaled(c[3]);
        }
    } else if (params.degree == 3) {
        if (c.size() != 2) throw Error(RM_ERR_ARITY, "degree 3 takes 2 coefficients");
        RatPolynomial c0 = K(c[0]);
        RatPolynomial sq = X * X + X * Y + Y * Y, sqm = X * X - X * Y + Y * Y;
        RatPolynomial g2 = (c0 + (Y - X).scaled(c[1])) * ((X - Y.scaled(2)).scaled(c[0]) - sqm.scaled(c[1]));
        if (params.family == "f1") {
            f = -((c0 + (X + Y).scaled(c[1])) * ((X + Y.scaled(2)).scaled(c[0]) + sq.scaled(c[1])));
            fb = g2;
        } else if (params.family == "f2") {
            f = g2;
            fb = g2;
        } else if (params.family == "f3") {
            f = (X + Y) * (K(c[0] * c[0]) - (X - Y).scaled(c[0] * c[1]) - sq.scaled(2 * c[1] * c[1]));
            fb = (c0 + (X - Y).scaled(c[1])) * ((X - Y).scaled(3 * c[0]) + sqm.scaled(2 * c[1]));
        } else {
            throw Error(RM_ERR_INVALID_ARGUMENT, "degree 3 family must be f1, f2 or f3");
        }
    } else {
        throw Error(RM_ERR_INVALID_ARGUMENT, "degree must be 1, 2 or 3");
    }
    auto at = [&](const RatPolynomial& p, const RatPolynomial& x, const RatPolynomial& y) { return p.substitute({x, y}); };
    RatPolynomial one = K(1), zero = K(0);
    RatPolynomial ffb = f * fb;
    RatPolynomial a = f - at(fb, X + one, Y);
    RatPolynomial b = at(ffb, X, zero) - at(ffb, zero, zero);
    if (b.is_zero()) throw Error(RM_ERR_DEGENERATE_PARAMS, "b(x) vanishes identically");

    Construction out;
    out.f = f;
    out.fbar = fb;
    out.linear_ok = (f - at(f, X + one, Y - one)) == (at(fb, X + one, Y) - at(fb, X, Y - one));
    out.quadratic_ok = (ffb + at(ffb, zero, zero)) == (at(ffb, X, zero) + at(ffb, zero, Y));
    out.field.vars = kXY;
    out.field.mats = {rat_mat_to_int(RatMatP(zero, b, one, a)), rat_mat_to_int(RatMatP(fb, b, one, f))};
    out.cocycle_ok = cocycle_check(out.field, 20).pass;
    bool ok = out.linear_ok && out.quadratic_ok && out.cocycle_ok;
    if (!ok && !(params.degree == 3 && params.family == "f2"))
        throw Error(RM_ERR_CONDITION_VIOLATED, "constructed field fails its conditions: " + out.json());
    return out;
}

Pcf make_family_pcf(const std::string& kind, const std::string& params_json) {
    nlohmann::json p;
    try {
        p = params_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(params_json);
    } catch (const std::exception& e) {
        throw Error(RM_ERR_SYNTAX, std::string("family params: ") + e.what());
    }
    auto n = RatPolynomial::variable(kN, 0);
    auto K = [](const BigRational& v) { return RatPolynomial::constant(kN, v); };
    auto get = [&](const char* key) -> const nlohmann::json& {
        if (!p.contains(key)) throw Error(RM_ERR_INVALID_ARGUMENT, std::string("missing parameter '") + key + "'");
        return p[key];
    };
    auto get_int = [&](const char* key) {
        BigRational v = json_rational(get(key));
        if (v.get_den() != 1) throw Error(RM_ERR_INVALID_ARGUMENT, std::string(key) + " must be an integer");
        return v.get_num().get_si();
    };
    RatPolynomial a(kN), b(kN);
    try {
        if (kind == "zigzag") {
            auto r = get("r"), s = get("s");
            if (r.size() != s.size() || r.empty()) throw Error(RM_ERR_ARITY, "r and s must have equal nonzero length");
            BigRational c = p.contains("c") ? json_rational(p["c"]) : BigRational(1);
            RatPolynomial pr = K(1), ps = K(1), ps1 = K(1);
            for (size_t i = 0; i < r.size(); ++i) {
                pr *= n + K(json_rational(r[i]));
                ps *= n + K(json_rational(s[i]));
                ps1 *= n + K(1 + json_rational(s[i]));
            }
            a = pr + ps1.scaled(c);
            b = -(pr * ps).scaled(c);
        } else if (kind == "zeta_hat") {
            long s = get_int("s");
            BigRational R = json_rational(get("R"));
            if (s < 2) throw Error(RM_ERR_DEGENERATE_PARAMS, "s must be at least 2");
            a = n.pow(static_cast<unsigned>(s)) + (n + K(1)).pow(static_cast<unsigned>(s - 1)) * (n + K(1 + R));
            b = -(n.pow(static_cast<unsigned>(2 * s - 1)) * (n + K(R)));
        } else if (kind == "polylog") {
            long d = get_int("d");
            BigRational c = json_rational(get("c"));
            if (d < 1 || c == 0) throw Error(RM_ERR_DEGENERATE_PARAMS, "polylog needs d >= 1 and c != 0");
            a = n.pow(static_cast<unsigned>(d)) + (n + K(1)).pow(static_cast<unsigned>(d)).scaled(c);
            b = -n.pow(static_cast<unsigned>(2 * d)).scaled(c);
        } else if (kind == "zeta3_alpha") {
            BigRational al = json_rational(get("alpha"));
            a = n.pow(3) + (n + K(1)).pow(3) + (n.scaled(2) + K(1)).scaled(2 * al * (al - 1));
            b = -n.pow(6);
        } else if (kind == "zeta2_alpha") {
            BigRational al = json_rational(get("alpha"));
            a = n.pow(2) + (n + K(1)).pow(2) + K(al * (al - 1));
            b = -n.pow(4);
        } else if (kind == "sigma") {
            long d = get_int("d");
            auto cs = get("c");
            BigRational B = p.contains("B") ? json_rational(p["B"]) : BigRational(1);
            if (d < 1 || B == 0) throw Error(RM_ERR_DEGENERATE_PARAMS, "sigma needs d >= 1 and B != 0");
            for (size_t i = 0; i < cs.size(); ++i) {
                long e = d - 2 * static_cast<long>(i);
                if (e < 0) throw Error(RM_ERR_ARITY, "too many sigma coefficients");
                RatPolynomial sig = e == 0 ? K(2) : n.pow(static_cast<unsigned>(e)) + (n + K(1)).pow(static_cast<unsigned>(e));
                a += sig.scaled(json_rational(cs[i]));
            }
            b = -n.pow(static_cast<unsigned>(2 * d)).scaled(B);
        } else {
            throw Error(RM_ERR_INVALID_ARGUMENT, "unknown family '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(RM_ERR_INVALID_ARGUMENT, std::string("family params: ") + e.what());
    }
    if (b.is_zero()) throw Error(RM_ERR_DEGENERATE_PARAMS, "b vanishes identically");
    // Equivalence (a, b) -> (k a, k^2 b) clears denominators without changing the value.
    BigInt k = lcm_den(b, lcm_den(a, BigInt(1)));
    BigRational kr(k);
    return Pcf(to_int_scaled(a, kr), to_int_scaled(b, kr * kr));
}

}  // namespace rm
