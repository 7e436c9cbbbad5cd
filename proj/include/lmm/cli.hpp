#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmm/estimator.hpp"
#include "lmm/functionals.hpp"
#include "lmm/metrics.hpp"
#include "lmm/sampling.hpp"

namespace lmm::cli {

using json = nlohmann::json;

/// Exit codes: success, runtime or I/O failure, usage or parse failure.
enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Filesystem failure; maps to kRuntimeError.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Counts file: a header line "n=<rate>", then one nonnegative integer per
/// line. Blank lines are ignored. Throws ParseError with the line number.
CountVector read_counts(std::istream& in);
CountVector read_counts_file(const std::string& path);
void write_counts(std::ostream& out, const CountVector& counts);

json to_json(const LmmConfig& config);
LmmConfig lmm_config_from_json(const json& j);
json to_json(const LmmDiagnostics& diagnostics);

struct SimulateOptions {
    std::string family = "uniform";
    std::size_t support = 1000;
    double n = 1000;
    std::size_t trials = 20;
    std::vector<std::string> estimators{"lmm", "empirical"};
    SamplingModel model = SamplingModel::Poissonized;
    std::uint64_t seed = 0;
    LmmConfig lmm;
    std::size_t threads = 0;  // 0: default_threads()

    json to_json() const;
    static SimulateOptions from_json(const json& j);
};

struct SimulateResult {
    std::vector<RiskReport> reports;
    std::string csv;
    json summary;
};

/// One RiskReport per estimator; CSV has one row per (estimator, trial).
SimulateResult cmd_simulate(const SimulateOptions& options);

struct EstimateOptions {
    std::string input;
    std::uint64_t seed = 0;
    LmmConfig lmm;

    json to_json() const;
    static EstimateOptions from_json(const json& j);
};

/// {"config", "estimate", "diagnostics"}.
json cmd_estimate(const EstimateOptions& options);

struct FunctionalOptions {
    std::string input;
    std::string functional = "entropy";
    double alpha = 0.5;
    std::size_t k_bar = 0;
    std::uint64_t seed = 0;
    LmmConfig lmm;

    FunctionalSpec spec() const;
    json to_json() const;
    static FunctionalOptions from_json(const json& j);
};

/// {"config", "lmm_value", "baseline_value", "diagnostics"}.
json cmd_functional(const FunctionalOptions& options);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace lmm::cli
