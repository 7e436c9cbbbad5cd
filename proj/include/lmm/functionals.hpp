#pragma once

#include <cstddef>

#include "lmm/estimator.hpp"
#include "lmm/measures.hpp"
#include "lmm/sampling.hpp"

namespace lmm {

/// Symmetric functional F(P) = sum_i f(p_i) with f(0) = 0.
class FunctionalSpec {
public:
    enum class Kind { Entropy, PowerSum, SupportSize };

    static FunctionalSpec entropy();
    /// Requires 0 < alpha < 1.
    static FunctionalSpec power_sum(double alpha);
    /// Distributions whose nonzero masses are all >= 1/k_bar; requires k_bar >= 2.
    static FunctionalSpec support_size(std::size_t k_bar);

    Kind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    std::size_t k_bar() const noexcept { return k_bar_; }

    /// -x ln x, x^alpha, or the indicator 1(x >= 1/(2 k_bar)); all vanish at 0.
    double operator()(double x) const;

private:
    FunctionalSpec(Kind kind, double alpha, std::size_t k_bar) : kind_(kind), alpha_(alpha), k_bar_(k_bar) {}

    Kind kind_;
    double alpha_;
    std::size_t k_bar_;
};

/// sum_g masses[g] f(points[g]).
double plug_in(const GridMeasure& measure, const FunctionalSpec& spec);

struct FunctionalEstimate {
    double value = 0.0;
    LmmDiagnostics diagnostics;
};

/// LMM measure followed by plug_in. Support size turns on the forbidden zone
/// (0, 1/k_bar) unless config already sets support_lower.
FunctionalEstimate estimate_functional(const CountVector& counts, const LmmConfig& config,
                                       const FunctionalSpec& spec, Rng& rng);

/// Plug-in of the full-sample empirical distribution; for support size, the
/// number of distinct observed symbols.
double baseline_functional(const CountVector& counts, const FunctionalSpec& spec);

}  // namespace lmm
