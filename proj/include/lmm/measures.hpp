#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lmm {

/// Probability vector over S symbols. Entries are nonnegative and sum to one
/// within 1e-9.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<double> probs);

    const std::vector<double>& probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<double> probs_;
};

/// Nonnegative values in nondecreasing order.
class SortedVector {
public:
    SortedVector() = default;
    explicit SortedVector(std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double sum() const noexcept;

private:
    std::vector<double> values_;
};

SortedVector sort_ascending(std::span<const double> probs);

/// Finitely supported nonnegative measure on [0,1]: atoms at strictly
/// increasing points with nonnegative masses.
class GridMeasure {
public:
    GridMeasure() = default;
    GridMeasure(std::vector<double> points, std::vector<double> masses);

    /// Each value in `values` receives `unit_mass`; coincident values merge.
    static GridMeasure from_atoms(std::span<const double> values, double unit_mass);

    const std::vector<double>& points() const noexcept { return points_; }
    const std::vector<double>& masses() const noexcept { return masses_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    double total_mass() const noexcept;

    /// Mass sitting exactly at 0.
    double mass_at_zero() const noexcept;

    GridMeasure scaled(double factor) const;
    GridMeasure with_added_mass(double point, double mass) const;

    friend GridMeasure operator+(const GridMeasure& a, const GridMeasure& b);

private:
    std::vector<double> points_;
    std::vector<double> masses_;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Quadratically growing partition of [0,1] used to localize each symbol.
/// With unit width w = c1 ln(n) / n, interval j (1-based) is
/// [w (j-1)^2, w j^2), the last one closed at 1. Interval indices in the
/// accessors below are 1-based.
class IntervalPartition {
public:
    double rate() const noexcept { return n_; }
    double c1() const noexcept { return c1_; }
    double log_rate() const noexcept { return log_n_; }
    double unit_width() const noexcept { return w_; }
    std::size_t count() const noexcept { return m_; }

    double lo(std::size_t j) const;
    double hi(std::size_t j) const;
    double center(std::size_t j) const;
    Interval interval(std::size_t j) const { return {lo(j), hi(j)}; }
    /// Enlarged interval [w (j-3/2)^2 1(j>=2), min(w (j+1)^2, 1)].
    Interval enlarged(std::size_t j) const;

private:
    friend IntervalPartition build_partition(double n, double c1);
    IntervalPartition(double n, double c1, double log_n, double w, std::size_t m)
        : n_(n), c1_(c1), log_n_(log_n), w_(w), m_(m) {}

    void check_index(std::size_t j) const;

    double n_;
    double c1_;
    double log_n_;
    double w_;
    std::size_t m_;
};

/// Throws ConfigError unless n >= 2 and c1 > 0.
IntervalPartition build_partition(double n, double c1);

/// Unique j with lo_j <= p < hi_j; p = 1 maps to the last interval.
std::size_t interval_index(const IntervalPartition& partition, double p);

}  // namespace lmm
