#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lmm/measures.hpp"
#include "lmm/moments.hpp"

namespace lmm {

/// Phase-1 objective above this value means infeasible. Rows are scaled by
/// mass * max |(g - center)/scale|^k, so this bounds each row's residual there.
inline constexpr double kFeasibilityTol = 1e-7;

/// Number of bisection steps in solve_min_mass.
inline constexpr int kBisectionSteps = 40;

/// G equally spaced points on [lo, hi]; with include_zero and lo > 0 the
/// point 0 is prepended. Throws ConfigError for G < 2 or lo > hi.
std::vector<double> discretize(double lo, double hi, std::size_t G, bool include_zero);

struct OpenInterval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return lo < x && x < hi; }
};

/// Local moment-matching program over a measure with atoms on `grid`:
///
///   sum_g w_g = total_mass,
///   | sum_g w_g (g - center)^k - targets[k-1] | <= tolerances[k-1],  k = 1..order,
///   w_g >= 0,  w_g = 0 on grid points inside forbidden_zone.
///
/// Internally every moment row is expressed in the basis ((g - center)/scale)^k.
/// The min-mass variant leaves total_mass empty and uses the radius
/// sqrt(m log_rate) scale^k for mass m.
struct FeasibilityProblem {
    std::vector<double> grid;
    double center = 0.0;
    double scale = 1.0;
    int order = 1;
    std::vector<double> targets;
    std::vector<double> tolerances;
    std::optional<double> total_mass;
    std::optional<OpenInterval> forbidden_zone;
    double log_rate = 0.0;

    /// Throws ConfigError on inconsistent fields.
    void validate() const;

    /// Largest |((g - center)/scale)^k| over the admissible grid and k <= order.
    double max_basis_magnitude() const;
};

/// Builds the program for one interval from its moment targets. `total_mass`
/// is S_j for j >= 2 and empty for the min-mass program.
FeasibilityProblem make_problem(const MomentTargets& targets, std::vector<double> grid,
                                std::optional<double> total_mass, std::optional<OpenInterval> forbidden_zone);

enum class LpStatus { Feasible, Infeasible };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    /// Present iff Feasible.
    std::optional<GridMeasure> measure;
    /// residuals[0] is |mass - total_mass|; residuals[k] is the scaled slack
    /// tolerance_k - |moment_k - target_k| (negative means violated).
    std::vector<double> residuals;
    double phase_one_objective = 0.0;
    std::size_t iterations = 0;
    /// Min-mass only.
    std::optional<double> accepted_mass;
    /// Min-mass only: feasibility in the mass could not be shown monotone.
    bool monotonicity_assumed = false;

    bool feasible() const noexcept { return status == LpStatus::Feasible; }
};

/// Among feasible measures returns one minimizing sum_k |moment_k - target_k| /
/// tolerance_k. Throws ConfigError without total_mass and SolverError on
/// numerical failure.
LpOutcome solve_feasibility(const FeasibilityProblem& problem);

/// Smallest mass m in [0, mass_upper] (to bisection precision) for which the
/// fixed-mass program with radius sqrt(m log_rate) scale^k is feasible. The
/// measure at the accepted mass is chosen as in solve_feasibility.
LpOutcome solve_min_mass(const FeasibilityProblem& problem, double mass_upper);

}  // namespace lmm
