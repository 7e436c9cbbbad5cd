#pragma once

// Reference computations used to check the library. None of these call the
// code under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "lmm/lpsolve.hpp"
#include "lmm/measures.hpp"

namespace oracle {

inline double poisson_pmf(long m, double lambda) {
    if (lambda == 0.0) return m == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(m) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(m) + 1.0));
}

/// E f(M) for M ~ Poisson(lambda), summed until the pmf past the mode drops
/// below 1e-18.
template <class F>
double poisson_expectation(F f, double lambda) {
    double sum = 0.0;
    const auto mode = static_cast<long>(lambda);
    for (long m = 0;; ++m) {
        const double pmf = poisson_pmf(m, lambda);
        sum += pmf * f(m);
        if (m > mode + 10 && pmf < 1e-18) break;
    }
    return sum;
}

/// Direct expansion of the falling-factorial estimator, one binomial term at
/// a time with no incremental reuse.
/// `magnitude`, if given, receives the sum of absolute terms.
inline double g_direct(int k, double x, double p_hat, double n, double* magnitude = nullptr) {
    double total = 0.0;
    double abs_total = 0.0;
    for (int l = 0; l <= k; ++l) {
        double binom = 1.0;
        for (int i = 1; i <= l; ++i) binom = binom * (k - l + i) / i;
        double ff = 1.0;
        for (int i = 0; i < l; ++i) ff *= p_hat - i / n;
        total += binom * std::pow(-x, k - l) * ff;
        abs_total += std::abs(binom * std::pow(-x, k - l) * ff);
    }
    if (magnitude) *magnitude = abs_total;
    return total;
}

/// W1 between normalized measures as the integral of |F - G| over [0, 1].
inline double w1_cdf(const lmm::GridMeasure& a, const lmm::GridMeasure& b) {
    std::vector<std::pair<double, double>> events;
    const double ma = a.total_mass();
    const double mb = b.total_mass();
    for (std::size_t i = 0; i < a.size(); ++i) events.emplace_back(a.points()[i], a.masses()[i] / ma);
    for (std::size_t i = 0; i < b.size(); ++i) events.emplace_back(b.points()[i], -b.masses()[i] / mb);
    std::sort(events.begin(), events.end());
    double diff = 0.0;
    double area = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        diff += events[i].second;
        if (i + 1 < events.size()) area += std::abs(diff) * (events[i + 1].first - events[i].first);
    }
    return area;
}

/// Measure placing `unit` at each value.
inline lmm::GridMeasure atoms(std::vector<double> values, double unit = 1.0) {
    std::sort(values.begin(), values.end());
    std::vector<double> pts;
    std::vector<double> mass;
    for (double v : values) {
        if (!pts.empty() && pts.back() == v) {
            mass.back() += unit;
        } else {
            pts.push_back(v);
            mass.push_back(unit);
        }
    }
    return lmm::GridMeasure(std::move(pts), std::move(mass));
}

/// Checks a measure against a local program using raw moments
/// sum w (g - x)^k: total mass, |moment - t_k| <= tau_k, atoms on the grid
/// and outside the forbidden zone. Without a fixed total mass the radius
/// for `mass` is recomputed from log_rate and scale. Slack is
/// 1e-6 max(1, tau_k / scale^k), in units of scale^k.
struct ConstraintCheck {
    bool ok = true;
    double worst_ratio = 0.0;  // max |moment - target| / tolerance
};

inline ConstraintCheck check_constraints(const lmm::GridMeasure& mu, const lmm::FeasibilityProblem& p,
                                         double mass, bool require_grid = true) {
    ConstraintCheck out;
    const double total = mu.total_mass();
    if (std::abs(total - mass) > 1e-6 * std::max(1.0, mass)) out.ok = false;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double g = mu.points()[i];
        if (mu.masses()[i] <= 0.0) continue;
        if (require_grid && !std::binary_search(p.grid.begin(), p.grid.end(), g)) out.ok = false;
        if (p.forbidden_zone && p.forbidden_zone->lo < g && g < p.forbidden_zone->hi) out.ok = false;
    }
    for (int k = 1; k <= p.order; ++k) {
        double moment = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) moment += mu.masses()[i] * std::pow(mu.points()[i] - p.center, k);
        const double tau = p.total_mass ? p.tolerances[k - 1]
                                        : std::sqrt(std::max(mass, 0.0) * p.log_rate) * std::pow(p.scale, k);
        const double err = std::abs(moment - p.targets[k - 1]);
        const double unit = std::pow(p.scale, k);
        // The solver accepts residuals up to its tolerance in rows scaled by
        // mass * max |g - center|^k, once in the moment row and once in its box.
        double reach = 0.0;
        for (double g : p.grid) reach = std::max(reach, std::pow(std::abs(g - p.center), k));
        const double slack = 1e-6 * std::max(1.0, tau / unit) * unit + 2.0 * lmm::kFeasibilityTol * mass * reach;
        if (err > tau + slack) out.ok = false;
        if (tau > 0.0) out.worst_ratio = std::max(out.worst_ratio, err / tau);
    }
    return out;
}

/// Pearson chi-square statistic for observed counts against expected counts.
inline double chi_square(const std::vector<double>& observed, const std::vector<double>& expected) {
    double s = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = observed[i] - expected[i];
        s += d * d / expected[i];
    }
    return s;
}

/// Wilson-Hilferty approximation to the chi-square upper quantile at
/// standard-normal level z.
inline double chi_square_quantile(double dof, double z) {
    const double a = 2.0 / (9.0 * dof);
    const double c = 1.0 - a + z * std::sqrt(a);
    return dof * c * c * c;
}

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double std_error(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace oracle
