#pragma once

#include <cstddef>
#include <vector>

namespace lmm::detail {

/// Dense equality system A x = b, x >= 0, row-major.
struct EqualitySystem {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;
    std::vector<double> b;

    double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

struct SimplexResult {
    bool feasible = false;
    /// Phase-1 optimum: the total artificial mass left.
    double infeasibility = 0.0;
    /// Phase-2 optimum of the cost; 0 without a cost.
    double objective = 0.0;
    std::size_t iterations = 0;
    std::vector<double> x;
};

/// Two-phase simplex on a dense tableau: Dantzig's rule, switching to Bland's
/// rule while stalled at a degenerate vertex. Phase 1 minimizes the sum of
/// one artificial per row; the system is feasible iff that optimum is at most
/// `feasibility_tol`. If feasible and `cost` is
/// nonempty, phase 2 minimizes cost . x. Throws SolverError past
/// `max_iterations` pivots in total or on an unbounded phase 2.
SimplexResult simplex(const EqualitySystem& system, const std::vector<double>& cost, double feasibility_tol,
                      std::size_t max_iterations);

}  // namespace lmm::detail
