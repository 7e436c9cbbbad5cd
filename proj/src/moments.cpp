#include "lmm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lmm/error.hpp"

namespace lmm {

double centered_moment_estimate(int k, double x, double p_hat, double n) {
    if (k < 0) throw ConfigError("moment order must be >= 0");
    if (!(n > 0.0)) throw ConfigError("sample rate must be > 0");
    // Falling factorials prod_{l'<l}(p_hat - l'/n) and the binomial weights
    // are both built incrementally.
    std::vector<double> neg_x_pow(static_cast<std::size_t>(k) + 1, 1.0);
    for (int i = 1; i <= k; ++i) neg_x_pow[i] = neg_x_pow[i - 1] * (-x);
    double falling = 1.0;
    double binom = 1.0;
    double sum = 0.0;
    for (int l = 0; l <= k; ++l) {
        sum += binom * neg_x_pow[k - l] * falling;
        falling *= p_hat - static_cast<double>(l) / n;
        binom = binom * static_cast<double>(k - l) / static_cast<double>(l + 1);
    }
    return sum;
}

int moment_count(double n, double c2) {
    const double k = std::floor(c2 * std::log(n));
    return k < 1.0 ? 1 : static_cast<int>(k);
}

double MomentTargets::radius(int k, double mass) const {
    return std::sqrt(std::max(mass, 0.0) * log_rate) * std::pow(scale, k);
}

MomentTargets moment_targets(const IntervalPartition& partition, std::size_t j,
                             std::span<const double> members, double c2, double c3) {
    if (!(c2 > 0.0) || !(c3 > 0.0)) throw ConfigError("c2 and c3 must be > 0");
    const double n = partition.rate();
    MomentTargets t;
    t.interval = j;
    t.order = moment_count(n, c2);
    t.members = members.size();
    t.center = partition.center(j);
    t.log_rate = partition.log_rate();
    t.scale = c3 * static_cast<double>(j) * t.log_rate / n;
    t.targets.assign(static_cast<std::size_t>(t.order), 0.0);
    t.tolerances.resize(static_cast<std::size_t>(t.order));
    for (double p : members) {
        for (int k = 1; k <= t.order; ++k) t.targets[k - 1] += centered_moment_estimate(k, t.center, p, n);
    }
    for (int k = 1; k <= t.order; ++k) t.tolerances[k - 1] = t.radius(k, static_cast<double>(t.members));
    return t;
}

}  // namespace lmm
