#include "lmm/functionals.hpp"

#include <cmath>

#include "lmm/error.hpp"

namespace lmm {

FunctionalSpec FunctionalSpec::entropy() { return {Kind::Entropy, 0.0, 0}; }

FunctionalSpec FunctionalSpec::power_sum(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("power sum requires 0 < alpha < 1");
    return {Kind::PowerSum, alpha, 0};
}

FunctionalSpec FunctionalSpec::support_size(std::size_t k_bar) {
    if (k_bar < 2) throw ConfigError("support size requires k_bar >= 2");
    return {Kind::SupportSize, 0.0, k_bar};
}

double FunctionalSpec::operator()(double x) const {
    if (x <= 0.0) return 0.0;
    switch (kind_) {
    case Kind::Entropy: return -x * std::log(x);
    case Kind::PowerSum: return std::pow(x, alpha_);
    case Kind::SupportSize: return x >= 0.5 / static_cast<double>(k_bar_) ? 1.0 : 0.0;
    }
    return 0.0;
}

double plug_in(const GridMeasure& measure, const FunctionalSpec& spec) {
    double total = 0.0;
    for (std::size_t g = 0; g < measure.size(); ++g) total += measure.masses()[g] * spec(measure.points()[g]);
    return total;
}

FunctionalEstimate estimate_functional(const CountVector& counts, const LmmConfig& config,
                                       const FunctionalSpec& spec, Rng& rng) {
    LmmConfig cfg = config;
    if (spec.kind() == FunctionalSpec::Kind::SupportSize && !cfg.support_lower) {
        cfg.support_lower = 1.0 / static_cast<double>(spec.k_bar());
    }
    auto m = lmm_measure(counts, cfg, rng);
    return {plug_in(m.measure, spec), std::move(m.diagnostics)};
}

double baseline_functional(const CountVector& counts, const FunctionalSpec& spec) {
    if (spec.kind() == FunctionalSpec::Kind::SupportSize) {
        double distinct = 0.0;
        for (auto c : counts.counts()) distinct += c > 0 ? 1.0 : 0.0;
        return distinct;
    }
    const auto total = static_cast<double>(counts.total());
    if (total <= 0.0) return 0.0;
    double value = 0.0;
    for (auto c : counts.counts()) value += spec(static_cast<double>(c) / total);
    return value;
}

}  // namespace lmm
