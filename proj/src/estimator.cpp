#include "lmm/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lmm/error.hpp"

namespace lmm {

namespace {

constexpr std::size_t kMinGrid = 64;
constexpr std::size_t kMaxGrid = 4096;

GridMeasure fallback_measure(const CountVector& second) {
    const auto freq = empirical(second);
    return GridMeasure::from_atoms(freq, 1.0);
}

}  // namespace

void LmmConfig::validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0) || !(c3 > 0.0) || !(c3_first > 0.0)) {
        throw ConfigError("c1, c2, c3, c3_first must be > 0");
    }
    if (grid_factor < 1) throw ConfigError("grid_factor must be >= 1");
    if (!(mass_bracket >= 1.0) || !std::isfinite(mass_bracket)) throw ConfigError("mass_bracket must be >= 1");
    if (support_size && *support_size < 1) throw ConfigError("support_size must be >= 1");
    if (support_lower && !(*support_lower > 0.0 && *support_lower <= 1.0)) {
        throw ConfigError("support_lower must lie in (0, 1]");
    }
    if (theory_mode) {
        if (!(c1 > 2.0 * c2)) throw ConfigError("theory mode requires c1 > 2 c2");
        if (!(c3 > 30.0 * c1) || !(c3_first > 30.0 * c1)) throw ConfigError("theory mode requires c3 > 30 c1");
    }
}

LmmConfig LmmConfig::theory() {
    LmmConfig c;
    c.c1 = 2.0;
    c.c2 = 0.45;
    c.c3 = 61.0;
    c.c3_first = 61.0;
    c.mass_bracket = 1.0;
    c.theory_mode = true;
    return c;
}

std::string to_string(IntervalStatus status) {
    switch (status) {
    case IntervalStatus::Empty: return "empty";
    case IntervalStatus::Feasible: return "feasible";
    case IntervalStatus::Infeasible: return "infeasible";
    case IntervalStatus::SolverError: return "solver-error";
    }
    return "unknown";
}

std::size_t grid_size(double width, double n, int order, int grid_factor) {
    const auto f = static_cast<std::size_t>(grid_factor);
    std::size_t g = std::max(kMinGrid, f * static_cast<std::size_t>(order));
    const double resolved = std::ceil(static_cast<double>(f) * n * width);
    if (resolved > static_cast<double>(g)) g = static_cast<std::size_t>(std::min(resolved, double(kMaxGrid)));
    return std::min(g, kMaxGrid);
}

LocalDesign build_local_problems(const SplitCounts& split, const LmmConfig& config) {
    config.validate();
    const double n = split.first.rate();
    LocalDesign design{build_partition(n, config.c1), {}};
    const auto& partition = design.partition;
    const auto first = empirical(split.first);
    const auto second = raw_frequencies(split.second);

    std::vector<std::vector<std::size_t>> members(partition.count() + 1);
    for (std::size_t i = 0; i < first.size(); ++i) members[interval_index(partition, first[i])].push_back(i);

    std::optional<OpenInterval> zone;
    if (config.support_lower) zone = OpenInterval{0.0, *config.support_lower};

    for (std::size_t j = 1; j <= partition.count(); ++j) {
        if (j >= 2 && members[j].empty()) continue;
        LocalProblem lp;
        lp.interval = j;
        lp.symbols = members[j];
        std::vector<double> p2;
        p2.reserve(lp.symbols.size());
        for (auto i : lp.symbols) p2.push_back(second[i]);
        lp.targets = moment_targets(partition, j, p2, config.c2, j == 1 ? config.c3_first : config.c3);

        const Interval range = partition.enlarged(j);
        const std::size_t G = grid_size(range.width(), n, lp.targets.order, config.grid_factor);
        auto grid = discretize(range.lo, range.hi, G, j == 1);
        if (j == 1) {
            lp.problem = make_problem(lp.targets, std::move(grid), std::nullopt, zone);
            if (config.support_size) {
                lp.mass_upper = static_cast<double>(*config.support_size);
            } else {
                std::size_t seen = 0;
                for (auto i : lp.symbols) seen += (split.first[i] + split.second[i]) > 0 ? 1 : 0;
                lp.mass_upper = static_cast<double>(seen) + config.mass_bracket * n;
            }
        } else {
            lp.problem = make_problem(lp.targets, std::move(grid), static_cast<double>(lp.symbols.size()), zone);
        }
        design.problems.push_back(std::move(lp));
    }
    return design;
}

MeasureResult lmm_measure(const CountVector& counts, const LmmConfig& config, Rng& rng) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    if (!(counts.rate() >= 4.0)) throw ConfigError("LMM requires a sample rate of at least 4");

    const auto split = split_counts(counts, rng);
    const auto design = build_local_problems(split, config);

    MeasureResult result;
    auto& diag = result.diagnostics;
    diag.working_rate = split.first.rate();
    diag.moment_order = moment_count(diag.working_rate, config.c2);

    GridMeasure total;
    bool failed = false;
    for (const auto& lp : design.problems) {
        IntervalReport report;
        report.interval = lp.interval;
        report.members = lp.symbols.size();
        report.grid_size = lp.problem.grid.size();
        try {
            LpOutcome out = lp.interval == 1 ? solve_min_mass(lp.problem, lp.mass_upper)
                                             : solve_feasibility(lp.problem);
            if (lp.interval == 1) {
                diag.monotonicity_assumed = out.monotonicity_assumed;
                if (out.feasible()) diag.min_mass = out.accepted_mass;
            }
            if (out.feasible()) {
                report.status = IntervalStatus::Feasible;
                report.mass = out.measure->total_mass();
                total = total + *out.measure;
            } else {
                report.status = IntervalStatus::Infeasible;
                failed = true;
            }
        } catch (const SolverError& e) {
            report.status = IntervalStatus::SolverError;
            report.message = e.what();
            failed = true;
        }
        diag.intervals.push_back(std::move(report));
    }

    diag.fallback = failed;
    result.measure = failed ? fallback_measure(split.second) : std::move(total);
    diag.total_mass = result.measure.total_mass();
    diag.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

SortedVector discretize_to_vector(const GridMeasure& measure, Rng& rng) {
    double total = measure.total_mass();
    if (!(total >= 0.0)) throw std::invalid_argument("measure mass must be >= 0");
    // Absorb rounding so an integral mass does not gain a spurious atom.
    const double nearest = std::round(total);
    const double s0 = std::abs(total - nearest) <= 1e-9 * std::max(1.0, total) ? nearest : std::ceil(total);
    const auto count = static_cast<std::size_t>(s0);
    if (count == 0) return SortedVector();

    const GridMeasure topped = s0 > total ? measure.with_added_mass(0.0, s0 - total) : measure;
    const auto& pts = topped.points();
    std::vector<double> cumulative(topped.size());
    double run = 0.0;
    for (std::size_t g = 0; g < topped.size(); ++g) cumulative[g] = (run += topped.masses()[g]);

    // q_i = F^{-1}((i - U_i)/S0) with F^{-1}(t) = sup{x : F(x) <= t}: the
    // first atom whose cumulative mass exceeds S0 t = i - U_i.
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> q(count);
    for (std::size_t i = 1; i <= count; ++i) {
        const double u = 1.0 - uniform(rng);
        const double level = static_cast<double>(i) - u;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), level);
        const auto g = it == cumulative.end() ? topped.size() - 1 : static_cast<std::size_t>(it - cumulative.begin());
        q[i - 1] = pts[g];
    }
    return SortedVector(std::move(q));
}

Estimate lmm_estimate(const CountVector& counts, const LmmConfig& config, Rng& rng) {
    auto m = lmm_measure(counts, config, rng);
    auto values = discretize_to_vector(m.measure, rng);
    return {std::move(values), std::move(m.measure), std::move(m.diagnostics)};
}

SortedVector sorted_empirical(const CountVector& counts) {
    const auto total = counts.total();
    std::vector<double> p(counts.size(), 0.0);
    if (total > 0) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return sort_ascending(p);
}

}  // namespace lmm
