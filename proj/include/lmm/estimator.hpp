#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lmm/lpsolve.hpp"
#include "lmm/measures.hpp"
#include "lmm/moments.hpp"
#include "lmm/sampling.hpp"

namespace lmm {

struct LmmConfig {
    double c1 = 2.0;
    double c2 = 0.35;
    /// Tolerance scale for the fixed-mass programs (intervals j >= 2).
    double c3 = 1.0;
    /// Tolerance scale for the first-interval min-mass program, whose
    /// objective pushes every moment to the edge of its tolerance.
    double c3_first = 0.05;
    /// Enforce c1 > 2 c2 and c3, c3_first > 30 c1.
    bool theory_mode = false;
    int grid_factor = 8;
    /// Without a known support size the first-interval mass search spans
    /// [0, seen + mass_bracket * n]. Extra mass lands at zero.
    double mass_bracket = 16.0;
    /// Known support size; bounds the first-interval mass search.
    std::optional<std::size_t> support_size;
    /// Lower bound 1/k on nonzero masses; forbids atoms in (0, support_lower).
    std::optional<double> support_lower;
    std::uint64_t seed = 0;

    void validate() const;

    /// Constants satisfying the theory-mode inequalities.
    static LmmConfig theory();
};

enum class IntervalStatus { Empty, Feasible, Infeasible, SolverError };

std::string to_string(IntervalStatus status);

struct IntervalReport {
    std::size_t interval = 1;
    IntervalStatus status = IntervalStatus::Empty;
    std::size_t members = 0;
    std::size_t grid_size = 0;
    double mass = 0.0;
    std::string message;
};

struct LmmDiagnostics {
    std::vector<IntervalReport> intervals;
    /// Accepted mass of the first-interval min-mass program.
    std::optional<double> min_mass;
    bool monotonicity_assumed = false;
    bool fallback = false;
    double total_mass = 0.0;
    double working_rate = 0.0;
    int moment_order = 0;
    double wall_seconds = 0.0;
};

/// One interval's program, built from the split sample.
struct LocalProblem {
    std::size_t interval = 1;
    /// Symbols whose first-half frequency falls in the interval.
    std::vector<std::size_t> symbols;
    MomentTargets targets;
    FeasibilityProblem problem;
    /// Bisection bracket (first interval only).
    double mass_upper = 0.0;
};

struct LocalDesign {
    IntervalPartition partition;
    std::vector<LocalProblem> problems;
};

/// Grid size for an interval of the given width at working rate n:
/// max(64, f K, ceil(f n width)), at most 4096, with f = grid_factor.
std::size_t grid_size(double width, double n, int order, int grid_factor);

/// Groups symbols by the interval of their first-half frequency and builds
/// every program. Intervals j >= 2 with no members are skipped; the first
/// interval is always present.
LocalDesign build_local_problems(const SplitCounts& split, const LmmConfig& config);

struct MeasureResult {
    GridMeasure measure;
    LmmDiagnostics diagnostics;
};

/// Split, localize, and solve every local program. On any failure the
/// sorted second-half empirical measure is returned and `fallback` is set.
/// Requires counts.rate() >= 4.
MeasureResult lmm_measure(const CountVector& counts, const LmmConfig& config, Rng& rng);

/// Randomized discretization of `measure` into S0 = ceil(total mass)
/// values after topping up the atom at 0 to S0.
SortedVector discretize_to_vector(const GridMeasure& measure, Rng& rng);

struct Estimate {
    SortedVector values;
    GridMeasure measure;
    LmmDiagnostics diagnostics;
};

Estimate lmm_estimate(const CountVector& counts, const LmmConfig& config, Rng& rng);

/// Sorted empirical distribution counts / total (all zeros for an empty sample).
SortedVector sorted_empirical(const CountVector& counts);

}  // namespace lmm
