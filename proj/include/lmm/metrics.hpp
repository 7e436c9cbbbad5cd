#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmm/estimator.hpp"
#include "lmm/measures.hpp"
#include "lmm/sampling.hpp"

namespace lmm {

/// Sum |p_(i) - q_(i)| after zero-padding the shorter vector and sorting both.
double sorted_l1(std::span<const double> p, std::span<const double> q);

/// Uniform probability measure on the multiset of `values`.
GridMeasure uniform_measure(std::span<const double> values);

/// W1 between the normalized versions of two measures, computed exactly
/// from their piecewise-constant quantile functions. Both masses must be
/// positive and agree within 1e-9 (relative to max(1, mass)).
double wasserstein_1d(const GridMeasure& mu, const GridMeasure& nu);

/// min over permutations s of sum |p_i - q_s(i)|, by enumeration. Equal
/// lengths, at most 8.
double matching_oracle(std::span<const double> p, std::span<const double> q);

/// An estimator under test: maps a sample to an estimate of the sorted
/// distribution. `truth` is only for debugging estimators.
struct TrialEstimator {
    std::string name;
    std::function<std::vector<double>(const CountVector&, const DiscreteDistribution& truth, Rng&)> run;
    std::optional<LmmConfig> config;
};

TrialEstimator lmm_trial_estimator(const LmmConfig& config);
TrialEstimator empirical_trial_estimator();
/// Returns the sorted truth; its risk is zero.
TrialEstimator oracle_trial_estimator();

struct RiskReport {
    std::string estimator;
    std::string family;
    std::size_t support = 0;
    double n = 0.0;
    std::size_t trials = 0;
    SamplingModel model = SamplingModel::Poissonized;
    std::uint64_t seed = 0;
    std::vector<double> losses;
    double mean_loss = 0.0;
    /// Sample standard deviation / sqrt(trials); 0 for one trial.
    double std_error = 0.0;
    std::optional<LmmConfig> config;
};

/// Worker count from LMM_THREADS, else the hardware concurrency.
std::size_t default_threads();

/// Trial t draws a sample from derive_stream(seed, t) and scores the
/// estimate by sorted_l1 against the sorted truth. The distribution itself
/// (relevant for random families) comes from a dedicated stream of `seed`.
RiskReport monte_carlo_risk(const Family& family, const TrialEstimator& estimator, std::size_t S, double n,
                            std::size_t trials, std::uint64_t seed, SamplingModel model,
                            std::size_t threads = default_threads());

/// The benchmark distribution monte_carlo_risk uses for (family, S, seed).
DiscreteDistribution benchmark_distribution(const Family& family, std::size_t S, std::uint64_t seed);

}  // namespace lmm
