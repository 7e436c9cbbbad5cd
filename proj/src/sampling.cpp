#include "lmm/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lmm/error.hpp"

namespace lmm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError("cannot parse number '" + std::string(s) + "'");
    }
    return v;
}

std::vector<double> normalized(std::vector<double> w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
    return w;
}

}  // namespace

Rng derive_stream(std::uint64_t root, std::uint64_t index) {
    const std::uint64_t a = splitmix64(root);
    const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

CountVector::CountVector(std::vector<std::int64_t> counts, double rate) : counts_(std::move(counts)), rate_(rate) {
    if (!(rate_ > 0.0) || !std::isfinite(rate_)) throw ConfigError("count vector rate must be > 0");
    for (auto c : counts_) {
        if (c < 0) throw ConfigError("counts must be nonnegative");
    }
}

std::int64_t CountVector::total() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

SamplingModel parse_model(std::string_view name) {
    if (name == "multinomial") return SamplingModel::Multinomial;
    if (name == "poissonized") return SamplingModel::Poissonized;
    throw ConfigError("unknown sampling model '" + std::string(name) + "'");
}

std::string to_string(SamplingModel model) {
    return model == SamplingModel::Multinomial ? "multinomial" : "poissonized";
}

CountVector draw_poissonized(const DiscreteDistribution& dist, double n, Rng& rng) {
    if (!(n > 0.0)) throw ConfigError("Poissonized sampling requires n > 0");
    std::vector<std::int64_t> counts(dist.size(), 0);
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double mean = n * dist[i];
        if (mean > 0.0) counts[i] = std::poisson_distribution<std::int64_t>(mean)(rng);
    }
    return CountVector(std::move(counts), n);
}

CountVector draw_multinomial(const DiscreteDistribution& dist, std::int64_t n, Rng& rng) {
    if (n < 1) throw ConfigError("multinomial sampling requires n >= 1");
    std::vector<std::int64_t> counts(dist.size(), 0);
    std::int64_t remaining = n;
    double remaining_mass = 1.0;
    // Sequential conditional binomials.
    for (std::size_t i = 0; i + 1 < dist.size() && remaining > 0; ++i) {
        const double p = remaining_mass > 0.0 ? std::clamp(dist[i] / remaining_mass, 0.0, 1.0) : 0.0;
        if (p > 0.0) counts[i] = std::binomial_distribution<std::int64_t>(remaining, p)(rng);
        remaining -= counts[i];
        remaining_mass -= dist[i];
    }
    counts.back() += remaining;
    return CountVector(std::move(counts), static_cast<double>(n));
}

CountVector draw_counts(const DiscreteDistribution& dist, double n, SamplingModel model, Rng& rng) {
    if (model == SamplingModel::Poissonized) return draw_poissonized(dist, n, rng);
    return draw_multinomial(dist, static_cast<std::int64_t>(std::llround(n)), rng);
}

SplitCounts split_counts(const CountVector& counts, Rng& rng) {
    std::vector<std::int64_t> first(counts.size(), 0);
    std::vector<std::int64_t> second(counts.size(), 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto c = counts[i];
        if (c > 0) first[i] = std::binomial_distribution<std::int64_t>(c, 0.5)(rng);
        second[i] = c - first[i];
    }
    const double half = counts.rate() / 2.0;
    return {CountVector(std::move(first), half), CountVector(std::move(second), half)};
}

std::vector<double> raw_frequencies(const CountVector& counts) {
    std::vector<double> f(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) f[i] = static_cast<double>(counts[i]) / counts.rate();
    return f;
}

std::vector<double> empirical(const CountVector& counts) {
    auto f = raw_frequencies(counts);
    for (double& x : f) x = std::min(x, 1.0);
    return f;
}

Family Family::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            params.push_back(parse_double(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    auto expect = [&](std::size_t count) {
        if (params.size() != count) {
            throw ConfigError("family '" + std::string(name) + "' expects " + std::to_string(count) + " parameter(s)");
        }
    };
    Family f;
    if (name == "uniform") {
        expect(0);
        f.kind = Kind::Uniform;
    } else if (name == "zipf") {
        expect(1);
        f.kind = Kind::Zipf;
        f.param1 = params[0];
    } else if (name == "two_level") {
        expect(2);
        f.kind = Kind::TwoLevel;
        f.param1 = params[0];
        f.param2 = params[1];
    } else if (name == "dirichlet") {
        expect(1);
        f.kind = Kind::Dirichlet;
        f.param1 = params[0];
    } else {
        throw ConfigError("unknown distribution family '" + std::string(name) + "'");
    }
    return f;
}

std::string Family::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
    case Kind::Uniform: os << "uniform"; break;
    case Kind::Zipf: os << "zipf:" << param1; break;
    case Kind::TwoLevel: os << "two_level:" << param1 << ',' << param2; break;
    case Kind::Dirichlet: os << "dirichlet:" << param1; break;
    }
    return os.str();
}

DiscreteDistribution make_distribution(const Family& family, std::size_t S, Rng& rng) {
    if (S < 1) throw ConfigError("support size must be >= 1");
    std::vector<double> w(S, 1.0);
    switch (family.kind) {
    case Family::Kind::Uniform:
        break;
    case Family::Kind::Zipf:
        if (!(family.param1 >= 0.0)) throw ConfigError("zipf exponent must be >= 0");
        for (std::size_t i = 0; i < S; ++i) w[i] = std::pow(static_cast<double>(i + 1), -family.param1);
        break;
    case Family::Kind::TwoLevel: {
        const double fraction = family.param1;
        const double ratio = family.param2;
        if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("two_level fraction must lie in (0, 1)");
        if (!(ratio > 0.0)) throw ConfigError("two_level ratio must be > 0");
        const auto heavy = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(S)));
        for (std::size_t i = 0; i < std::min(heavy, S); ++i) w[i] = ratio;
        break;
    }
    case Family::Kind::Dirichlet: {
        if (!(family.param1 > 0.0)) throw ConfigError("dirichlet concentration must be > 0");
        std::gamma_distribution<double> gamma(family.param1, 1.0);
        double total = 0.0;
        do {
            total = 0.0;
            for (double& x : w) total += (x = gamma(rng));
        } while (!(total > 0.0));
        break;
    }
    }
    return DiscreteDistribution(normalized(std::move(w)));
}

}  // namespace lmm
