#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "lmm/cli.hpp"
#include "lmm/error.hpp"

using namespace lmm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("lmm_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

/// Runs the CLI in-process with stdout and stderr captured.
struct RunResult {
    int code;
    std::string out;
};

RunResult invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "lmm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    const int code = cli::run(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str()};
}

}  // namespace

TEST_CASE("counts files") {
    std::istringstream ok("n=10\n3\n\n7\n");
    const auto c = cli::read_counts(ok);
    CHECK(c.rate() == 10);
    CHECK(c.counts() == std::vector<std::int64_t>{3, 7});

    std::ostringstream out;
    cli::write_counts(out, CountVector({1, 0, 5}, 2.5));
    CHECK(out.str() == "n=2.5\n1\n0\n5\n");
    std::istringstream back(out.str());
    CHECK(cli::read_counts(back).counts() == std::vector<std::int64_t>{1, 0, 5});

    auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            cli::read_counts(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("3\n4\n") == 1);
    CHECK(line_of("n=10\n3\nabc\n") == 3);
    CHECK(line_of("n=10\n3\n-1\n") == 3);
    CHECK(line_of("\nn=zero\n") == 2);
    CHECK(line_of("n=-4\n") == 1);
    CHECK(line_of("") == 1);
    CHECK(line_of("n=10\n1.5\n") == 2);
    CHECK_THROWS_AS(cli::read_counts_file("/nonexistent/counts.txt"), cli::IoError);
}

TEST_CASE("config serialization round-trips") {
    LmmConfig c;
    c.c1 = 3.0;
    c.support_size = 40;
    c.support_lower = 0.025;
    c.mass_bracket = 4.0;
    c.seed = 99;
    const auto back = cli::lmm_config_from_json(cli::to_json(c));
    CHECK(back.c1 == 3.0);
    CHECK(back.c2 == c.c2);
    CHECK(back.c3 == c.c3);
    CHECK(back.support_size == 40);
    CHECK(back.support_lower == 0.025);
    CHECK(back.mass_bracket == 4.0);
    CHECK(back.seed == 99);
    CHECK_FALSE(cli::lmm_config_from_json(cli::to_json(LmmConfig{})).support_size.has_value());

    cli::SimulateOptions so;
    so.family = "zipf:1.5";
    so.model = SamplingModel::Multinomial;
    const auto so2 = cli::SimulateOptions::from_json(so.to_json());
    CHECK(so2.family == "zipf:1.5");
    CHECK(so2.model == SamplingModel::Multinomial);
    CHECK_THROWS_AS(cli::SimulateOptions::from_json(cli::json::object()), ConfigError);
}

TEST_CASE("simulate") {
    cli::SimulateOptions so;
    so.support = 200;
    so.n = 400;
    so.trials = 20;
    so.seed = 7;
    so.threads = 2;
    const auto a = cli::cmd_simulate(so);
    std::istringstream lines(a.csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "estimator,family,S,n,model,seed,trial,loss");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 40);
    CHECK(a.summary["reports"].size() == 2);
    CHECK(a.summary["config"]["seed"] == 7);
    CHECK(a.summary["config"]["lmm"]["c3"] == so.lmm.c3);

    so.threads = 1;
    const auto b = cli::cmd_simulate(so);
    CHECK(a.csv == b.csv);
    CHECK(a.summary.dump() == b.summary.dump());

    so.model = SamplingModel::Multinomial;
    CHECK(cli::cmd_simulate(so).reports[1].losses != a.reports[1].losses);

    so.estimators = {"bogus"};
    CHECK_THROWS_AS(cli::cmd_simulate(so), ConfigError);
}

TEST_CASE("run: simulate files, determinism and config rerun") {
    TempDir dir;
    const std::vector<std::string> args{"simulate", "--family", "uniform", "--S", "150", "--n", "300", "--trials", "4",
                                        "--estimators", "lmm,empirical", "--seed", "5"};
    auto with = [&](const std::string& csv, const std::string& js) {
        auto a = args;
        a.insert(a.end(), {"--csv", csv, "--json", js});
        return a;
    };
    REQUIRE(invoke(with(dir / "a.csv", dir / "a.json")).code == cli::kOk);
    REQUIRE(invoke(with(dir / "b.csv", dir / "b.json")).code == cli::kOk);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    REQUIRE(invoke({"simulate", "--config", dir / "a.json", "--csv", dir / "c.csv", "--json", dir / "c.json"}).code ==
            cli::kOk);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "c.csv"));
    CHECK(slurp(dir / "a.json") == slurp(dir / "c.json"));
}

TEST_CASE("run: exit codes") {
    TempDir dir;
    CHECK(invoke({}).code == cli::kUsageError);
    CHECK(invoke({"simulate", "--bogus-flag"}).code == cli::kUsageError);
    CHECK(invoke({"simulate", "--family", "cauchy", "--trials", "1"}).code == cli::kUsageError);
    CHECK(invoke({"simulate", "--estimators", "nope", "--trials", "1"}).code == cli::kUsageError);
    CHECK(invoke({"simulate", "--model", "binomial", "--trials", "1"}).code == cli::kUsageError);
    CHECK(invoke({"simulate", "--S", "10", "--n", "20", "--trials", "1", "--estimators", "empirical", "--csv",
                  dir / "missing_dir/out.csv"})
              .code == cli::kRuntimeError);

    spit(dir / "bad.txt", "n=10\n1\nx\n");
    CHECK(invoke({"estimate", "--input", dir / "bad.txt"}).code == cli::kUsageError);
    CHECK(invoke({"estimate", "--input", dir / "absent.txt"}).code == cli::kRuntimeError);
    CHECK(invoke({"estimate"}).code == cli::kUsageError);

    spit(dir / "good.txt", "n=40\n10\n10\n10\n10\n");
    CHECK(invoke({"functional", "--input", dir / "good.txt", "--functional", "power_sum", "--alpha", "1.5"}).code ==
          cli::kUsageError);
    CHECK(invoke({"functional", "--input", dir / "good.txt", "--functional", "support_size"}).code ==
          cli::kUsageError);
    CHECK(invoke({"functional", "--input", dir / "good.txt", "--functional", "mystery"}).code == cli::kUsageError);
    CHECK(invoke({"estimate", "--input", dir / "good.txt", "--c3", "-1"}).code == cli::kUsageError);
    spit(dir / "broken.json", "{not json");
    CHECK(invoke({"estimate", "--config", dir / "broken.json"}).code == cli::kUsageError);
}

TEST_CASE("run: sample, estimate, functional") {
    TempDir dir;
    REQUIRE(invoke({"sample", "--family", "uniform", "--S", "300", "--n", "600", "--seed", "3", "--output",
                    dir / "counts.txt"})
                .code == cli::kOk);
    const auto counts = cli::read_counts_file(dir / "counts.txt");
    CHECK(counts.size() == 300);
    CHECK(counts.rate() == 600);

    REQUIRE(invoke({"estimate", "--input", dir / "counts.txt", "--seed", "4", "--output", dir / "est.json"}).code ==
            cli::kOk);
    const auto est = cli::json::parse(slurp(dir / "est.json"));
    CHECK(est["config"]["seed"] == 4);
    CHECK(est["config"]["lmm"]["seed"] == 4);
    CHECK(est["diagnostics"].contains("fallback"));
    CHECK_FALSE(est["diagnostics"].contains("wall_seconds"));

    REQUIRE(invoke({"estimate", "--config", dir / "est.json", "--output", dir / "est2.json"}).code == cli::kOk);
    CHECK(slurp(dir / "est.json") == slurp(dir / "est2.json"));

    // Re-scoring the written estimate gives the in-process loss bit-for-bit.
    cli::EstimateOptions eo;
    eo.input = dir / "counts.txt";
    eo.seed = 4;
    eo.lmm.seed = 4;
    Rng rng = derive_stream(4, 0);
    const auto direct = lmm_estimate(counts, eo.lmm, rng);
    const auto truth = benchmark_distribution(Family::parse("uniform"), 300, 3).probs();
    const auto written = est["estimate"].get<std::vector<double>>();
    CHECK(sorted_l1(truth, written) == sorted_l1(truth, direct.values.values()));

    REQUIRE(invoke({"functional", "--input", dir / "counts.txt", "--functional", "entropy", "--output",
                    dir / "h.json"})
                .code == cli::kOk);
    const auto h = cli::json::parse(slurp(dir / "h.json"));
    CHECK(h["baseline_value"].get<double>() > 0.0);
    CHECK(h["lmm_value"].get<double>() > 0.0);
    CHECK(h["config"]["functional"] == "entropy");

    const auto stdout_run = invoke({"functional", "--input", dir / "counts.txt", "--functional", "support_size",
                                    "--k-bar", "300"});
    REQUIRE(stdout_run.code == cli::kOk);
    const auto s = cli::json::parse(stdout_run.out);
    CHECK(s["config"]["k_bar"] == 300);
    CHECK(s["baseline_value"].get<double>() <= 300.0);
}
