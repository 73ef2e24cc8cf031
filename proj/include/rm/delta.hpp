#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rm/field.hpp"

namespace rm {

// Supplies the target constant L at a requested precision.
using TargetFn = std::function<HPDecimal(long digits)>;

struct DeltaReport {
    std::string method;  // Empirical | ClosedForm
    double delta = 0;
    double delta_std = 0;
    double ln_s = 0;
    double ln_eigen_ratio = 0;
    Trajectory traj;
    long steps = 0;
    std::vector<std::pair<long, double>> samples;  // (step, delta)
    // ClosedForm only.
    std::string eig_max, eig_min;
    double eig_max_value = 0, eig_min_value = 0;
    std::vector<std::string> balanced_cell, leading_matrix;
    std::string trace_leading, det_leading;
    std::string json() const;
};

// Resolves the target L of delta: a catalog constant name (Mobius relation found by PSLQ, then
// evaluated at the requested precision) or "limit" (the deep trajectory limit itself).
TargetFn field_target(const MatrixField& field, const Trajectory& traj, const std::string& constant);
TargetFn fixed_target(const HPDecimal& L);

// delta = -ln|p/q - L| / ln q - 1 for one reduced potential.
double delta_of(const BigInt& p, const BigInt& q, const TargetFn& L);

DeltaReport delta_empirical(const MatrixField& field, const Trajectory& traj, const TargetFn& L, long steps);

// Empirical delta of an arbitrary rational sequence (index, p, q) against L.
DeltaReport delta_sequence(const std::vector<std::tuple<long, BigInt, BigInt>>& seq, const TargetFn& L);

DeltaReport delta_closed_form(const MatrixField& field, const Trajectory& traj, long steps = 1500);

struct DeltaCell {
    long x, y;
    double delta;
};

// Cells (x, y) in [1, xmax] x [1, ymax] walked from (1, 1); cells without a finite value are omitted.
std::vector<DeltaCell> delta_map(const MatrixField& field, long xmax, long ymax, const TargetFn& L);
std::string delta_map_csv(const std::vector<DeltaCell>& cells);

struct OptimizeResult {
    std::vector<std::vector<long>> path;  // greedy: visited cells; lls: argmax cells per anti-diagonal
    std::vector<long> direction;
    std::vector<double> path_delta;  // pointwise delta at each path cell
    std::vector<double> fit;  // lls: fitted slope (dx/dn, dy/dn)
    DeltaReport report;       // empirical delta along `direction`
    std::string json() const;
};

OptimizeResult optimize_greedy(const MatrixField& field, const TargetFn& L, long horizon, long tail_steps = 600);
OptimizeResult optimize_lls(const MatrixField& field, const TargetFn& L, long horizon, long tail_steps = 600);

struct CombinationPlan {
    int target = 5;
    std::map<int, long> R;               // starting R per s
    std::map<int, BigRational> coeffs;   // c_s, and c_0 under key 0
    std::string mode;                    // fixed | lattice | search
    std::vector<long> lattice_dir{1, 1}; // (R step, depth step) per lattice step
    long check_digits = 0;               // agreement of sum c_s zhat(s, R_s) with zeta(target)
    DeltaReport report;
    std::string json() const;
};

// Exact coefficients with sum_s c_s zhat(s, R_s) + c_0 = zeta(target).
std::map<int, BigRational> combination_coefficients(int target, const std::map<int, long>& R);

// fixed: R stays put and depth grows to `depth`; lattice: at lattice step t = 1..depth the
// components use R_s + (t-1)*dir[0] and depth t*dir[1]; search: the best of a few small
// lattice directions.
CombinationPlan zeta_combination(int target, const std::map<int, long>& R, long depth, const std::string& mode,
                                 const std::vector<long>& dir = {1, 1});

}  // namespace rm
