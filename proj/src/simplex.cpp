#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lmm/error.hpp"

namespace lmm::detail {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;
constexpr double kRatioTol = 1e-13;
// Entries below this in a pinned row only move its artificial negligibly.
constexpr double kPinTol = 1e-7;
// Consecutive degenerate pivots before switching to Bland's rule.
constexpr std::size_t kStallLimit = 50;

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), width_(cols + 1), data_((rows + 1) * width_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * width_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * width_ + j]; }
    std::size_t rhs() const { return width_ - 1; }
    std::size_t objective_row() const { return rows_; }

    void pivot(std::size_t r, std::size_t c) {
        double* pr = &data_[r * width_];
        const double inv = 1.0 / pr[c];
        for (std::size_t j = 0; j < width_; ++j) pr[j] *= inv;
        pr[c] = 1.0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            double* pi = &data_[i * width_];
            const double f = pi[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) pi[j] -= f * pr[j];
            pi[c] = 0.0;
        }
    }

private:
    std::size_t rows_;
    std::size_t width_;
    std::vector<double> data_;
};

/// Pivots on columns [0, eligible) until no reduced cost is negative.
/// Dantzig's rule, with Bland's rule while pivots stall at a degenerate
/// vertex. Basic variables at index >= `pinned` must stay at zero, so any
/// nonzero entry in their row blocks the step. Returns false if some
/// entering column has no leaving row.
bool run_pivots(Tableau& t, std::vector<std::size_t>& basis, std::size_t eligible, std::size_t pinned,
                std::size_t& iterations, std::size_t max_iterations) {
    const std::size_t m = basis.size();
    const std::size_t obj = t.objective_row();
    std::size_t stalled = 0;
    for (;;) {
        const bool bland = stalled >= kStallLimit;
        std::size_t enter = eligible;
        double steepest = -kCostTol;
        for (std::size_t j = 0; j < eligible; ++j) {
            if (t(obj, j) < steepest) {
                enter = j;
                if (bland) break;
                steepest = t(obj, j);
            }
        }
        if (enter == eligible) return true;

        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            const double coef = t(i, enter);
            const bool pin = basis[i] >= pinned && std::abs(coef) > kPinTol;
            if (coef <= kPivotTol && !pin) continue;
            const double ratio = pin ? 0.0 : t(i, t.rhs()) / coef;
            if (ratio < best - kRatioTol || (leave != m && ratio <= best + kRatioTol && basis[i] < basis[leave])) {
                best = ratio;
                leave = i;
            }
        }
        if (leave == m) return false;

        if (++iterations > max_iterations) {
            throw SolverError("simplex exceeded " + std::to_string(max_iterations) + " iterations");
        }
        stalled = best <= kRatioTol ? stalled + 1 : 0;
        t.pivot(leave, enter);
        basis[leave] = enter;
    }
}

}  // namespace

SimplexResult simplex(const EqualitySystem& system, const std::vector<double>& cost, double feasibility_tol,
                      std::size_t max_iterations) {
    const std::size_t m = system.rows;
    const std::size_t n = system.cols;
    const std::size_t total = n + m;
    Tableau t(m, total);
    std::vector<std::size_t> basis(m);

    for (std::size_t i = 0; i < m; ++i) {
        const double sign = system.b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t(i, j) = sign * system.at(i, j);
        t(i, n + i) = 1.0;
        t(i, t.rhs()) = sign * system.b[i];
        basis[i] = n + i;
    }
    // Reduced costs of min sum(artificials) with the artificial basis.
    const std::size_t obj = t.objective_row();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t(obj, j) -= t(i, j);
        t(obj, t.rhs()) -= t(i, t.rhs());
    }

    SimplexResult result;
    // Phase 1 is bounded below by 0; an unbounded ray means breakdown.
    if (!run_pivots(t, basis, total, total, result.iterations, max_iterations)) {
        throw SolverError("phase-1 simplex found no leaving row");
    }
    result.infeasibility = -t(obj, t.rhs());
    result.feasible = result.infeasibility <= feasibility_tol;

    if (result.feasible && !cost.empty()) {
        // Artificials never re-enter; basic ones are pinned at zero, which
        // leaves the phase-1 residual where it was.
        for (std::size_t i = 0; i < m; ++i) {
            t(i, t.rhs()) = basis[i] >= n ? 0.0 : std::max(t(i, t.rhs()), 0.0);
        }
        // Normalized so the reduced-cost tolerance is relative.
        double cmax = 0.0;
        for (double c : cost) cmax = std::max(cmax, std::abs(c));
        if (!(cmax > 0.0)) cmax = 1.0;
        for (std::size_t j = 0; j <= total; ++j) t(obj, j) = j < n ? cost[j] / cmax : 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double cb = basis[i] < n ? cost[basis[i]] / cmax : 0.0;
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= total; ++j) t(obj, j) -= cb * t(i, j);
        }
        if (!run_pivots(t, basis, n, n, result.iterations, max_iterations)) {
            throw SolverError("phase-2 simplex is unbounded");
        }
        result.objective = -t(obj, t.rhs()) * cmax;
    }

    result.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) result.x[basis[i]] = std::max(t(i, t.rhs()), 0.0);
    }
    return result;
}

}  // namespace lmm::detail
