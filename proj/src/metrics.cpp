#include "lmm/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

#include "lmm/error.hpp"

namespace lmm {

double sorted_l1(std::span<const double> p, std::span<const double> q) {
    const std::size_t len = std::max(p.size(), q.size());
    std::vector<double> a(len, 0.0);
    std::vector<double> b(len, 0.0);
    std::copy(p.begin(), p.end(), a.begin());
    std::copy(q.begin(), q.end(), b.begin());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double total = 0.0;
    for (std::size_t i = 0; i < len; ++i) total += std::abs(a[i] - b[i]);
    return total;
}

GridMeasure uniform_measure(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("uniform measure needs at least one value");
    return GridMeasure::from_atoms(values, 1.0 / static_cast<double>(values.size()));
}

double wasserstein_1d(const GridMeasure& mu, const GridMeasure& nu) {
    const double ma = mu.total_mass();
    const double mb = nu.total_mass();
    if (!(ma > 0.0) || !(mb > 0.0)) throw std::invalid_argument("wasserstein_1d needs measures of positive mass");
    if (std::abs(ma - mb) > 1e-9 * std::max(1.0, std::max(ma, mb))) {
        throw std::invalid_argument("wasserstein_1d needs measures of equal total mass");
    }
    // Walk the merged breakpoints of the two normalized CDFs; between
    // breakpoints both quantile functions are constant.
    const auto& xa = mu.points();
    const auto& xb = nu.points();
    const auto& wa = mu.masses();
    const auto& wb = nu.masses();
    std::size_t i = 0;
    std::size_t j = 0;
    double ca = wa[0] / ma;
    double cb = wb[0] / mb;
    double prev = 0.0;
    double total = 0.0;
    while (i < xa.size() && j < xb.size()) {
        const double next = std::min(ca, cb);
        if (next > prev) total += std::abs(xa[i] - xb[j]) * (next - prev);
        prev = std::max(prev, next);
        const bool last_a = i + 1 == xa.size();
        const bool last_b = j + 1 == xb.size();
        if (last_a && last_b) break;
        if ((ca <= cb && !last_a) || last_b) {
            ca += wa[++i] / ma;
        } else {
            cb += wb[++j] / mb;
        }
    }
    // Rounding can leave a sliver below 1 on one side.
    if (prev < 1.0) total += std::abs(xa.back() - xb.back()) * (1.0 - prev);
    return total;
}

double matching_oracle(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("matching_oracle needs equal lengths");
    if (p.size() > 8) throw std::invalid_argument("matching_oracle supports length <= 8");
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) cost += std::abs(p[i] - q[perm[i]]);
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

TrialEstimator lmm_trial_estimator(const LmmConfig& config) {
    return {"lmm",
            [config](const CountVector& counts, const DiscreteDistribution&, Rng& rng) {
                return lmm_estimate(counts, config, rng).values.values();
            },
            config};
}

TrialEstimator empirical_trial_estimator() {
    return {"empirical",
            [](const CountVector& counts, const DiscreteDistribution&, Rng&) {
                return sorted_empirical(counts).values();
            },
            std::nullopt};
}

TrialEstimator oracle_trial_estimator() {
    return {"oracle",
            [](const CountVector&, const DiscreteDistribution& truth, Rng&) {
                return sort_ascending(truth.probs()).values();
            },
            std::nullopt};
}

std::size_t default_threads() {
    if (const char* env = std::getenv("LMM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

DiscreteDistribution benchmark_distribution(const Family& family, std::size_t S, std::uint64_t seed) {
    Rng rng = derive_stream(seed, std::numeric_limits<std::uint64_t>::max());
    return make_distribution(family, S, rng);
}

RiskReport monte_carlo_risk(const Family& family, const TrialEstimator& estimator, std::size_t S, double n,
                            std::size_t trials, std::uint64_t seed, SamplingModel model, std::size_t threads) {
    if (trials < 1) throw ConfigError("need at least one trial");
    const auto truth = benchmark_distribution(family, S, seed);
    const auto sorted_truth = sort_ascending(truth.probs());

    RiskReport report;
    report.estimator = estimator.name;
    report.family = family.to_string();
    report.support = S;
    report.n = n;
    report.trials = trials;
    report.model = model;
    report.seed = seed;
    report.config = estimator.config;
    report.losses.assign(trials, 0.0);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t t = next++; t < trials && !failed; t = next++) {
            try {
                Rng rng = derive_stream(seed, t);
                const auto counts = draw_counts(truth, n, model, rng);
                const auto estimate = estimator.run(counts, truth, rng);
                report.losses[t] = sorted_l1(estimate, sorted_truth.values());
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, trials);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    const double mean = std::accumulate(report.losses.begin(), report.losses.end(), 0.0) / static_cast<double>(trials);
    double ss = 0.0;
    for (double l : report.losses) ss += (l - mean) * (l - mean);
    report.mean_loss = mean;
    report.std_error = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
    return report;
}

}  // namespace lmm
