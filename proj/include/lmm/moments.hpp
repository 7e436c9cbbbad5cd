#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lmm/measures.hpp"

namespace lmm {

/// Unbiased estimate of (p - x)^k from an observed frequency p_hat = m / n
/// under n p_hat ~ Poisson(n p):
///
///   sum_{l=0}^{k} C(k,l) (-x)^{k-l} prod_{l'=0}^{l-1} (p_hat - l'/n).
///
/// p_hat must be the unclamped frequency. Throws ConfigError for k < 0 or
/// n <= 0.
double centered_moment_estimate(int k, double x, double p_hat, double n);

/// Number of matched moments, max(1, floor(c2 ln n)).
int moment_count(double n, double c2);

/// Per-interval moment targets and tolerance radii.
///
/// targets[k-1] = sum over members of centered_moment_estimate(k, x_j, ., n)
/// tolerances[k-1] = sqrt(members * ln n) * scale^k, scale = c3 j ln n / n.
///
/// For the first interval the radius depends on the (unknown) total mass;
/// use radius(k, mass) there.
struct MomentTargets {
    std::size_t interval = 1;
    int order = 1;
    std::size_t members = 0;
    double center = 0.0;
    double scale = 1.0;
    double log_rate = 0.0;
    std::vector<double> targets;
    std::vector<double> tolerances;

    double radius(int k, double mass) const;
};

MomentTargets moment_targets(const IntervalPartition& partition, std::size_t j,
                             std::span<const double> members, double c2, double c3);

}  // namespace lmm
