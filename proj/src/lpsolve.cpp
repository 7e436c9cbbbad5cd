#include "lmm/lpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lmm/error.hpp"
#include "simplex.hpp"

namespace lmm {

namespace {

// Beyond this the scaled rows lose too many digits even after equilibration.
constexpr double kMaxBasisMagnitude = 1e12;

std::vector<double> admissible_grid(const FeasibilityProblem& p) {
    std::vector<double> g;
    g.reserve(p.grid.size());
    for (double x : p.grid) {
        if (p.forbidden_zone && p.forbidden_zone->contains(x)) continue;
        g.push_back(x);
    }
    return g;
}

/// basis[k-1][i] = ((grid[i] - center)/scale)^k
std::vector<std::vector<double>> scaled_basis(const std::vector<double>& grid, double center, double scale,
                                              int order) {
    std::vector<std::vector<double>> phi(static_cast<std::size_t>(order), std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double y = (grid[i] - center) / scale;
        double v = 1.0;
        for (int k = 1; k <= order; ++k) {
            v *= y;
            phi[k - 1][i] = v;
        }
    }
    return phi;
}

/// Fixed-mass feasibility in scaled units. tol_scaled[k-1] = tolerance / scale^k.
/// `optimize` picks the feasible point closest to the targets instead of the
/// first vertex found.
LpOutcome solve_scaled(const std::vector<double>& grid, const std::vector<std::vector<double>>& phi,
                       const std::vector<double>& t_scaled, const std::vector<double>& tol_scaled, double mass,
                       bool optimize) {
    const auto order = phi.size();
    LpOutcome out;

    auto fill_residuals = [&](const std::vector<double>& w) {
        out.residuals.assign(order + 1, 0.0);
        double m = 0.0;
        for (double x : w) m += x;
        out.residuals[0] = std::abs(m - mass);
        for (std::size_t k = 0; k < order; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * phi[k][i];
            out.residuals[k + 1] = tol_scaled[k] - std::abs(s - t_scaled[k]);
        }
    };

    if (mass <= 0.0 || grid.empty()) {
        bool ok = mass <= 0.0;
        for (std::size_t k = 0; k < order && ok; ++k) ok = std::abs(t_scaled[k]) <= tol_scaled[k] + kFeasibilityTol;
        fill_residuals(std::vector<double>(grid.size(), 0.0));
        out.status = ok ? LpStatus::Feasible : LpStatus::Infeasible;
        if (ok) out.measure = GridMeasure();
        return out;
    }

    // Variables: w_g / mass (G), then per moment the deviations d+_k, d-_k
    // and their box slacks e+_k, e-_k.
    // Row 0: sum w = 1. Row 1+k: sum w phi_k / s_k - d+_k + d-_k = t_k / (mass s_k).
    // Boxes: d+_k + e+_k = d-_k + e-_k = tol_k / (mass s_k).
    // With `optimize` the feasible point minimizes sum_k (d+_k + d-_k) / box_k.
    const std::size_t G = grid.size();
    detail::EqualitySystem sys;
    sys.rows = 1 + 3 * order;
    sys.cols = G + 4 * order;
    sys.a.assign(sys.rows * sys.cols, 0.0);
    sys.b.assign(sys.rows, 0.0);
    std::vector<double> cost;
    if (optimize) cost.assign(sys.cols, 0.0);
    for (std::size_t i = 0; i < G; ++i) sys.at(0, i) = 1.0;
    sys.b[0] = 1.0;
    for (std::size_t k = 0; k < order; ++k) {
        double s = 0.0;
        for (double v : phi[k]) s = std::max(s, std::abs(v));
        if (!(s > 0.0)) s = 1.0;
        const std::size_t dp = G + 4 * k;
        const std::size_t row = 1 + k;
        for (std::size_t i = 0; i < G; ++i) sys.at(row, i) = phi[k][i] / s;
        sys.at(row, dp) = -1.0;
        sys.at(row, dp + 1) = 1.0;
        sys.b[row] = t_scaled[k] / (mass * s);
        const double box = tol_scaled[k] / (mass * s);
        for (std::size_t side = 0; side < 2; ++side) {
            const std::size_t r = 1 + order + 2 * k + side;
            sys.at(r, dp + side) = 1.0;
            sys.at(r, dp + 2 + side) = 1.0;
            sys.b[r] = box;
        }
        if (optimize) cost[dp] = cost[dp + 1] = box > 0.0 ? 1.0 / box : 1.0;
    }

    const std::size_t cap = 50 * (sys.cols + sys.rows);
    const auto res = detail::simplex(sys, cost, kFeasibilityTol, cap);
    out.phase_one_objective = res.infeasibility;
    out.iterations = res.iterations;
    std::vector<double> w(G, 0.0);
    for (std::size_t i = 0; i < G; ++i) w[i] = res.x[i] * mass;
    fill_residuals(w);
    if (!res.feasible) {
        out.status = LpStatus::Infeasible;
        return out;
    }
    out.status = LpStatus::Feasible;
    std::vector<double> pts;
    std::vector<double> ms;
    for (std::size_t i = 0; i < G; ++i) {
        if (w[i] > 0.0) {
            pts.push_back(grid[i]);
            ms.push_back(w[i]);
        }
    }
    out.measure = GridMeasure(std::move(pts), std::move(ms));
    return out;
}

std::vector<double> scaled_targets(const FeasibilityProblem& p) {
    std::vector<double> t(p.targets.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = p.targets[k] / std::pow(p.scale, static_cast<double>(k + 1));
    return t;
}

}  // namespace

std::vector<double> discretize(double lo, double hi, std::size_t G, bool include_zero) {
    if (G < 2) throw ConfigError("grid needs at least 2 points");
    if (!(lo <= hi)) throw ConfigError("grid requires lo <= hi");
    std::vector<double> g;
    g.reserve(G + 1);
    if (include_zero && lo > 0.0) g.push_back(0.0);
    const double step = (hi - lo) / static_cast<double>(G - 1);
    for (std::size_t i = 0; i < G; ++i) {
        const double x = i + 1 == G ? hi : lo + step * static_cast<double>(i);
        if (g.empty() || x > g.back()) g.push_back(x);
    }
    return g;
}

void FeasibilityProblem::validate() const {
    if (grid.empty()) throw ConfigError("feasibility problem needs a nonempty grid");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ConfigError("grid must be strictly increasing");
    }
    if (order < 1) throw ConfigError("moment order must be >= 1");
    if (!(scale > 0.0)) throw ConfigError("moment scale must be > 0");
    if (targets.size() != static_cast<std::size_t>(order)) throw ConfigError("need one target per moment");
    if (total_mass) {
        if (!(*total_mass >= 0.0)) throw ConfigError("total mass must be >= 0");
        if (tolerances.size() != static_cast<std::size_t>(order)) throw ConfigError("need one tolerance per moment");
        for (double t : tolerances) {
            if (!(t >= 0.0)) throw ConfigError("tolerances must be >= 0");
        }
    }
    if (max_basis_magnitude() > kMaxBasisMagnitude) {
        throw ConfigError("scaled moment basis exceeds " + std::to_string(kMaxBasisMagnitude) +
                          "; refine the scale or lower the moment count");
    }
}

double FeasibilityProblem::max_basis_magnitude() const {
    double best = 0.0;
    for (double x : admissible_grid(*this)) {
        const double y = std::abs((x - center) / scale);
        best = std::max(best, std::pow(y, std::max(order, 1)));
        best = std::max(best, y);
    }
    return best;
}

FeasibilityProblem make_problem(const MomentTargets& targets, std::vector<double> grid,
                                std::optional<double> total_mass, std::optional<OpenInterval> forbidden_zone) {
    FeasibilityProblem p;
    p.grid = std::move(grid);
    p.center = targets.center;
    p.scale = targets.scale;
    p.order = targets.order;
    p.targets = targets.targets;
    p.tolerances = targets.tolerances;
    p.total_mass = total_mass;
    p.forbidden_zone = forbidden_zone;
    p.log_rate = targets.log_rate;
    return p;
}

LpOutcome solve_feasibility(const FeasibilityProblem& problem) {
    if (!problem.total_mass) throw ConfigError("solve_feasibility requires a total mass");
    problem.validate();
    const auto grid = admissible_grid(problem);
    const auto phi = scaled_basis(grid, problem.center, problem.scale, problem.order);
    const auto t = scaled_targets(problem);
    std::vector<double> tol(problem.tolerances.size());
    for (std::size_t k = 0; k < tol.size(); ++k) {
        tol[k] = problem.tolerances[k] / std::pow(problem.scale, static_cast<double>(k + 1));
    }
    return solve_scaled(grid, phi, t, tol, *problem.total_mass, true);
}

LpOutcome solve_min_mass(const FeasibilityProblem& problem, double mass_upper) {
    if (!(mass_upper >= 0.0)) throw ConfigError("mass upper bound must be >= 0");
    if (!(problem.log_rate > 0.0)) throw ConfigError("min-mass program needs log_rate > 0");
    FeasibilityProblem shape = problem;
    shape.total_mass.reset();
    shape.validate();

    const auto grid = admissible_grid(problem);
    const auto phi = scaled_basis(grid, problem.center, problem.scale, problem.order);
    const auto t = scaled_targets(problem);
    const auto order = static_cast<std::size_t>(problem.order);

    // In the scaled basis the radius sqrt(m ln n) scale^k becomes sqrt(m ln n).
    auto attempt = [&](double mass, bool optimize = false) {
        const std::vector<double> tol(order, std::sqrt(mass * problem.log_rate));
        auto out = solve_scaled(grid, phi, t, tol, mass, optimize);
        out.accepted_mass = mass;
        return out;
    };

    // Zero mass on an atom at the center contributes nothing to any moment,
    // and the radius grows with m, so feasibility is monotone in m.
    const bool monotone = std::find(grid.begin(), grid.end(), problem.center) != grid.end();

    auto at_zero = attempt(0.0);
    if (at_zero.feasible()) return at_zero;
    auto best = attempt(mass_upper);
    best.monotonicity_assumed = !monotone;
    if (!best.feasible()) return best;

    double lo = 0.0;
    double hi = mass_upper;
    std::size_t iterations = best.iterations;
    for (int step = 0; step < kBisectionSteps; ++step) {
        const double mid = 0.5 * (lo + hi);
        auto out = attempt(mid);
        iterations += out.iterations;
        if (out.feasible()) {
            hi = mid;
            best = std::move(out);
        } else {
            lo = mid;
        }
    }
    best = attempt(hi, true);
    best.iterations = iterations + best.iterations;
    best.monotonicity_assumed = !monotone;
    return best;
}

}  // namespace lmm
