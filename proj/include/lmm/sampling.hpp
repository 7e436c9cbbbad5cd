#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lmm/measures.hpp"

namespace lmm {

using Rng = std::mt19937_64;

/// Independent stream for trial `index` of an experiment seeded with `root`.
/// Depends only on (root, index), so trials can run in any order.
Rng derive_stream(std::uint64_t root, std::uint64_t index);

/// Per-symbol counts together with the nominal rate they were drawn at.
class CountVector {
public:
    CountVector(std::vector<std::int64_t> counts, double rate);

    const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
    double rate() const noexcept { return rate_; }
    std::size_t size() const noexcept { return counts_.size(); }
    std::int64_t operator[](std::size_t i) const { return counts_[i]; }
    std::int64_t total() const noexcept;

private:
    std::vector<std::int64_t> counts_;
    double rate_;
};

/// Binomial thinning of one sample into two halves, each at half the rate.
struct SplitCounts {
    CountVector first;
    CountVector second;
};

enum class SamplingModel { Multinomial, Poissonized };

SamplingModel parse_model(std::string_view name);
std::string to_string(SamplingModel model);

CountVector draw_poissonized(const DiscreteDistribution& dist, double n, Rng& rng);
CountVector draw_multinomial(const DiscreteDistribution& dist, std::int64_t n, Rng& rng);
CountVector draw_counts(const DiscreteDistribution& dist, double n, SamplingModel model, Rng& rng);

SplitCounts split_counts(const CountVector& counts, Rng& rng);

/// counts / rate, clamped to [0,1].
std::vector<double> empirical(const CountVector& counts);

/// counts / rate without clamping; the moment estimators need the raw count.
std::vector<double> raw_frequencies(const CountVector& counts);

/// Benchmark families. Text form: "uniform", "zipf:<s>",
/// "two_level:<fraction>,<ratio>", "dirichlet:<alpha>".
struct Family {
    enum class Kind { Uniform, Zipf, TwoLevel, Dirichlet };
    Kind kind = Kind::Uniform;
    double param1 = 0.0;
    double param2 = 0.0;

    static Family parse(std::string_view text);
    std::string to_string() const;
};

/// Dirichlet draws consume `rng`; the other families are deterministic.
DiscreteDistribution make_distribution(const Family& family, std::size_t S, Rng& rng);

}  // namespace lmm
