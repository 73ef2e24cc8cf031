#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rm/mat2.hpp"
#include "rm/pcf.hpp"

namespace rm {

// d pairwise-conservative 2x2 integer polynomial matrices over `vars`.
struct MatrixField {
    std::vector<std::string> vars;
    std::vector<PolyMat> mats;
    IntMat initial = identity_int();

    size_t dimension() const { return mats.size(); }
    // {"dimension": d, "vars": [...], "matrices": [[4 texts], ...], "initial": [4 ints]}
    std::string json() const;
    static MatrixField from_json(const std::string& text);
};

// zeta3, e, pi, zeta2, zeta2_4d or zeta2_4d(C) with rational C.
MatrixField catalog_field(const std::string& name);
std::vector<std::string> catalog_field_names();
// Catalog name, inline JSON or a path to a JSON file.
MatrixField load_field(const std::string& spec);

struct CocycleViolation {
    size_t i = 0, j = 0;
    std::vector<long> point;
    IntMat lhs, rhs;
};

struct CocycleReport {
    bool pass = true;
    long points_checked = 0;
    std::optional<CocycleViolation> violation;
    std::string json() const;
};

CocycleReport cocycle_check(const MatrixField& field, long grid_max);

struct Trajectory {
    std::vector<BigRational> start;
    std::vector<long> direction;
};

Trajectory diagonal(size_t dim);
Trajectory parse_trajectory(const std::string& start, const std::string& dir, size_t dim);

struct PotentialState {
    long step = 0;  // unit cells walked
    std::vector<BigRational> position;
    IntMat V;        // reduced potential
    BigRational g{1};  // true potential = g * V
};

// Walks unit cells: direction[0] steps of M_1, then direction[1] steps of M_2, ...
class Walker {
public:
    Walker(const MatrixField& field, const Trajectory& traj, bool track_g = true);
    void advance();
    void advance_axis(size_t axis);  // a single step along one axis
    const PotentialState& state() const { return s_; }

private:
    IntMat eval_at_position(size_t axis, BigRational* scale) const;

    const MatrixField& field_;
    Trajectory traj_;
    bool integral_;
    bool track_g_;
    PotentialState s_;
};

// Reduced walk states at the given step counts (ascending).
std::vector<PotentialState> walk(const MatrixField& field, const Trajectory& traj, const std::vector<long>& samples);

// Ratio of the right-column entries V12/V22, certified by the backoff comparison.
PrecisionReport traj_limit(const MatrixField& field, const Trajectory& traj, long steps, long digits, long margin = 5);

HPDecimal right_ratio(const IntMat& V, long digits);

// x_i -> x_i + shift_i, each matrix multiplied by the lcm of its coefficient denominators.
MatrixField shift_field(const MatrixField& field, const std::vector<BigRational>& shifts);

// M_s -> U^-1 M_s U(s -> s+1), cleared of denominators by a constant scalar.
MatrixField coboundary(const MatrixField& field, const PolyMat& U);
PolyMat parse_poly_mat(const std::string& json_or_list, const std::vector<std::string>& vars);

// Unit-cell step matrix in the variable n; position = start + (n-1) * direction.
PolyMat unit_cell(const MatrixField& field, const Trajectory& traj);
// Divides by the polynomial and integer content of the four entries.
PolyMat balanced(const PolyMat& cell, IntPolynomial* content_out = nullptr);

struct PcfConversion {
    Pcf pcf;
    long offset = 0;      // pcf index n corresponds to cell n + 1 + offset
    IntMat mobius;        // walk limit = (m0 L + m1) / (m2 L + m3), L the Pcf limit
    IntPolynomial cell_content;
    bool swapped = false; // elimination pivot was the upper-right entry
    long verified_steps = 0;
    std::string json() const;
};

PcfConversion cmf_to_pcf(const MatrixField& field, const Trajectory& traj);

// Left-column ratio V11/V21 after `cells` unit cells, as an exact projective pair.
std::pair<BigInt, BigInt> left_column(const MatrixField& field, const Trajectory& traj, long cells);

struct ConstructionParams {
    int degree = 1;
    std::string family;  // degree 3: f1, f2, f3
    std::vector<BigRational> c;
};

struct Construction {
    MatrixField field;
    RatPolynomial f, fbar;
    bool linear_ok = false;
    bool quadratic_ok = false;
    bool cocycle_ok = false;
    std::string json() const;
};

Construction construct(const ConstructionParams& params);

// Generators for the parametric Pcf families. Params as JSON text.
// zigzag {"r":[..],"s":[..],"c":k}, zeta_hat {"s":5,"R":1}, polylog {"d":2,"c":2},
// zeta3_alpha {"alpha":a}, zeta2_alpha {"alpha":a}, sigma {"d":3,"c":[c_d,c_d-2,..],"B":1}
Pcf make_family_pcf(const std::string& kind, const std::string& params_json);

}  // namespace rm
