#include "lmm/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lmm/error.hpp"

namespace lmm {

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ConfigError("distribution must have at least one symbol");
    double total = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0) throw ConfigError("distribution entries must be finite and >= 0");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("distribution entries sum to " + std::to_string(total) + ", expected 1");
    }
}

SortedVector::SortedVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0)) throw std::invalid_argument("sorted vector entries must be >= 0");
        if (i > 0 && values_[i] < values_[i - 1]) throw std::invalid_argument("sorted vector must be nondecreasing");
    }
}

double SortedVector::sum() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

SortedVector sort_ascending(std::span<const double> probs) {
    std::vector<double> v(probs.begin(), probs.end());
    std::sort(v.begin(), v.end());
    return SortedVector(std::move(v));
}

GridMeasure::GridMeasure(std::vector<double> points, std::vector<double> masses)
    : points_(std::move(points)), masses_(std::move(masses)) {
    if (points_.size() != masses_.size()) throw std::invalid_argument("points and masses differ in length");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i])) throw std::invalid_argument("grid measure point is not finite");
        if (i > 0 && !(points_[i] > points_[i - 1])) {
            throw std::invalid_argument("grid measure points must be strictly increasing");
        }
        if (!std::isfinite(masses_[i]) || masses_[i] < 0.0) {
            throw std::invalid_argument("grid measure masses must be finite and >= 0");
        }
    }
}

GridMeasure GridMeasure::from_atoms(std::span<const double> values, double unit_mass) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> points;
    std::vector<double> masses;
    for (double v : sorted) {
        if (!points.empty() && points.back() == v) {
            masses.back() += unit_mass;
        } else {
            points.push_back(v);
            masses.push_back(unit_mass);
        }
    }
    return GridMeasure(std::move(points), std::move(masses));
}

double GridMeasure::total_mass() const noexcept {
    return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

double GridMeasure::mass_at_zero() const noexcept {
    if (!points_.empty() && points_.front() == 0.0) return masses_.front();
    return 0.0;
}

GridMeasure GridMeasure::scaled(double factor) const {
    if (!(factor >= 0.0)) throw std::invalid_argument("scale factor must be >= 0");
    std::vector<double> m(masses_);
    for (double& x : m) x *= factor;
    return GridMeasure(points_, std::move(m));
}

GridMeasure GridMeasure::with_added_mass(double point, double mass) const {
    return *this + GridMeasure({point}, {mass});
}

GridMeasure operator+(const GridMeasure& a, const GridMeasure& b) {
    std::vector<double> points;
    std::vector<double> masses;
    points.reserve(a.size() + b.size());
    masses.reserve(a.size() + b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        double p;
        double m;
        if (j == b.size() || (i < a.size() && a.points_[i] < b.points_[j])) {
            p = a.points_[i];
            m = a.masses_[i++];
        } else if (i == a.size() || b.points_[j] < a.points_[i]) {
            p = b.points_[j];
            m = b.masses_[j++];
        } else {
            p = a.points_[i];
            m = a.masses_[i++] + b.masses_[j++];
        }
        points.push_back(p);
        masses.push_back(m);
    }
    return GridMeasure(std::move(points), std::move(masses));
}

IntervalPartition build_partition(double n, double c1) {
    if (!(n >= 2.0) || !std::isfinite(n)) throw ConfigError("partition requires sample rate n >= 2");
    if (!(c1 > 0.0) || !std::isfinite(c1)) throw ConfigError("partition requires c1 > 0");
    const double log_n = std::log(n);
    const double w = c1 * log_n / n;
    auto m = static_cast<std::size_t>(std::ceil(std::sqrt(1.0 / w)));
    m = std::max<std::size_t>(m, 1);
    // Rounding in ceil(sqrt(.)) can leave an empty last interval.
    while (m > 1 && w * static_cast<double>((m - 1) * (m - 1)) >= 1.0) --m;
    return IntervalPartition(n, c1, log_n, w, m);
}

void IntervalPartition::check_index(std::size_t j) const {
    if (j < 1 || j > m_) throw std::out_of_range("interval index " + std::to_string(j) + " outside [1, M]");
}

double IntervalPartition::lo(std::size_t j) const {
    check_index(j);
    const double jm1 = static_cast<double>(j - 1);
    return w_ * jm1 * jm1;
}

double IntervalPartition::hi(std::size_t j) const {
    check_index(j);
    if (j == m_) return 1.0;
    const double jd = static_cast<double>(j);
    return std::min(w_ * jd * jd, 1.0);
}

double IntervalPartition::center(std::size_t j) const {
    check_index(j);
    const double jd = static_cast<double>(j);
    // The last interval is truncated at 1; keep its center inside it.
    return std::min(w_ * jd * (jd - 1.0), hi(j));
}

Interval IntervalPartition::enlarged(std::size_t j) const {
    check_index(j);
    const double jd = static_cast<double>(j);
    const double lo = j >= 2 ? w_ * (jd - 1.5) * (jd - 1.5) : 0.0;
    const double hi = std::min(w_ * (jd + 1.0) * (jd + 1.0), 1.0);
    return {std::min(lo, hi), hi};
}

std::size_t interval_index(const IntervalPartition& partition, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("interval_index requires p in [0, 1]");
    const std::size_t m = partition.count();
    auto j = static_cast<std::size_t>(std::floor(std::sqrt(p / partition.unit_width()))) + 1;
    j = std::min(j, m);
    while (j > 1 && p < partition.lo(j)) --j;
    while (j < m && p >= partition.hi(j)) ++j;
    return j;
}

}  // namespace lmm
