#include "lmm/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lmm/error.hpp"

namespace lmm::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

TrialEstimator make_trial_estimator(const std::string& name, const LmmConfig& config) {
    if (name == "lmm") return lmm_trial_estimator(config);
    if (name == "empirical") return empirical_trial_estimator();
    if (name == "oracle") return oracle_trial_estimator();
    throw ConfigError("unknown estimator '" + name + "'");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        json j = json::parse(in);
        return j.contains("config") ? j.at("config") : j;
    } catch (const json::exception& e) {
        throw ConfigError("invalid config file " + path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("failed writing " + path);
}

/// CLI flags that override fields of an LmmConfig.
struct LmmFlags {
    std::optional<double> c1, c2, c3, c3_first, support_lower, mass_bracket;
    std::optional<int> grid_factor;
    std::optional<std::size_t> support_size;
    bool theory_mode = false;

    void attach(CLI::App* app) {
        app->add_option("--c1", c1, "interval width constant");
        app->add_option("--c2", c2, "moment count constant (K = floor(c2 ln n))");
        app->add_option("--c3", c3, "tolerance scale constant, intervals j >= 2");
        app->add_option("--c3-first", c3_first, "tolerance scale constant, first-interval min-mass program");
        app->add_option("--grid-factor", grid_factor, "grid oversampling factor");
        app->add_option("--mass-bracket", mass_bracket, "first-interval mass search bound, in units of n");
        app->add_option("--support-size", support_size, "known support size");
        app->add_option("--support-lower", support_lower, "lower bound 1/k on nonzero masses");
        app->add_flag("--theory-mode", theory_mode, "use and enforce the theoretical constants");
    }

    LmmConfig apply(LmmConfig base) const {
        if (theory_mode) base = LmmConfig::theory();
        if (c1) base.c1 = *c1;
        if (c2) base.c2 = *c2;
        if (c3) base.c3 = *c3;
        if (c3_first) base.c3_first = *c3_first;
        if (grid_factor) base.grid_factor = *grid_factor;
        if (mass_bracket) base.mass_bracket = *mass_bracket;
        if (support_size) base.support_size = *support_size;
        if (support_lower) base.support_lower = *support_lower;
        return base;
    }
};

}  // namespace

CountVector read_counts(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<double> rate;
    std::vector<std::int64_t> counts;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (!rate) {
            if (t.rfind("n=", 0) != 0) throw ParseError(lineno, "expected header 'n=<rate>'");
            const std::string v = trim(t.substr(2));
            std::size_t used = 0;
            double r = 0.0;
            try {
                r = std::stod(v, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != v.size() || !(r > 0.0)) throw ParseError(lineno, "rate must be a positive number");
            rate = r;
            continue;
        }
        if (t.find_first_not_of("0123456789") != std::string::npos) {
            throw ParseError(lineno, "expected a nonnegative integer count, got '" + t + "'");
        }
        try {
            counts.push_back(std::stoll(t));
        } catch (const std::exception&) {
            throw ParseError(lineno, "count out of range");
        }
    }
    if (!rate) throw ParseError(lineno == 0 ? 1 : lineno, "missing header 'n=<rate>'");
    return CountVector(std::move(counts), *rate);
}

CountVector read_counts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_counts(in);
}

void write_counts(std::ostream& out, const CountVector& counts) {
    out << "n=" << format_double(counts.rate()) << '\n';
    for (auto c : counts.counts()) out << c << '\n';
}

json to_json(const LmmConfig& c) {
    json j;
    j["c1"] = c.c1;
    j["c2"] = c.c2;
    j["c3"] = c.c3;
    j["c3_first"] = c.c3_first;
    j["theory_mode"] = c.theory_mode;
    j["grid_factor"] = c.grid_factor;
    j["mass_bracket"] = c.mass_bracket;
    j["support_size"] = c.support_size ? json(*c.support_size) : json(nullptr);
    j["support_lower"] = c.support_lower ? json(*c.support_lower) : json(nullptr);
    j["seed"] = c.seed;
    return j;
}

LmmConfig lmm_config_from_json(const json& j) {
    LmmConfig c;
    c.c1 = j.value("c1", c.c1);
    c.c2 = j.value("c2", c.c2);
    c.c3 = j.value("c3", c.c3);
    c.c3_first = j.value("c3_first", c.c3_first);
    c.theory_mode = j.value("theory_mode", c.theory_mode);
    c.grid_factor = j.value("grid_factor", c.grid_factor);
    c.mass_bracket = j.value("mass_bracket", c.mass_bracket);
    if (j.contains("support_size") && !j["support_size"].is_null()) c.support_size = j["support_size"].get<std::size_t>();
    if (j.contains("support_lower") && !j["support_lower"].is_null()) c.support_lower = j["support_lower"].get<double>();
    c.seed = j.value("seed", c.seed);
    return c;
}

json to_json(const LmmDiagnostics& d) {
    json j;
    j["fallback"] = d.fallback;
    j["total_mass"] = d.total_mass;
    j["working_rate"] = d.working_rate;
    j["moment_order"] = d.moment_order;
    j["min_mass"] = d.min_mass ? json(*d.min_mass) : json(nullptr);
    j["monotonicity_assumed"] = d.monotonicity_assumed;
    json intervals = json::array();
    for (const auto& r : d.intervals) {
        json ij;
        ij["interval"] = r.interval;
        ij["status"] = to_string(r.status);
        ij["members"] = r.members;
        ij["grid_size"] = r.grid_size;
        ij["mass"] = r.mass;
        if (!r.message.empty()) ij["message"] = r.message;
        intervals.push_back(std::move(ij));
    }
    j["intervals"] = std::move(intervals);
    return j;
}

json SimulateOptions::to_json() const {
    json j;
    j["command"] = "simulate";
    j["family"] = family;
    j["S"] = support;
    j["n"] = n;
    j["trials"] = trials;
    j["estimators"] = estimators;
    j["model"] = lmm::to_string(model);
    j["seed"] = seed;
    j["lmm"] = cli::to_json(lmm);
    return j;
}

SimulateOptions SimulateOptions::from_json(const json& j) {
    SimulateOptions o;
    try {
        o.family = j.at("family").get<std::string>();
        o.support = j.at("S").get<std::size_t>();
        o.n = j.at("n").get<double>();
        o.trials = j.at("trials").get<std::size_t>();
        o.estimators = j.at("estimators").get<std::vector<std::string>>();
        o.model = parse_model(j.at("model").get<std::string>());
        o.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("lmm")) o.lmm = lmm_config_from_json(j.at("lmm"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid simulate config: ") + e.what());
    }
    return o;
}

SimulateResult cmd_simulate(const SimulateOptions& options) {
    if (options.estimators.empty()) throw ConfigError("no estimators requested");
    const Family family = Family::parse(options.family);
    const std::size_t threads = options.threads == 0 ? default_threads() : options.threads;
    options.lmm.validate();

    SimulateResult result;
    std::ostringstream csv;
    csv << "estimator,family,S,n,model,seed,trial,loss\n";
    json reports = json::array();
    for (const auto& name : options.estimators) {
        const auto estimator = make_trial_estimator(name, options.lmm);
        auto report = monte_carlo_risk(family, estimator, options.support, options.n, options.trials, options.seed,
                                       options.model, threads);
        for (std::size_t t = 0; t < report.losses.size(); ++t) {
            csv << report.estimator << ',' << report.family << ',' << report.support << ','
                << format_double(report.n) << ',' << lmm::to_string(report.model) << ',' << report.seed << ',' << t
                << ',' << format_double(report.losses[t]) << '\n';
        }
        json rj;
        rj["estimator"] = report.estimator;
        rj["trials"] = report.trials;
        rj["mean_loss"] = report.mean_loss;
        rj["std_error"] = report.std_error;
        reports.push_back(std::move(rj));
        result.reports.push_back(std::move(report));
    }
    result.csv = csv.str();
    result.summary["config"] = options.to_json();
    result.summary["reports"] = std::move(reports);
    return result;
}

json EstimateOptions::to_json() const {
    json j;
    j["command"] = "estimate";
    j["input"] = input;
    j["seed"] = seed;
    j["lmm"] = cli::to_json(lmm);
    return j;
}

EstimateOptions EstimateOptions::from_json(const json& j) {
    EstimateOptions o;
    try {
        o.input = j.at("input").get<std::string>();
        o.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("lmm")) o.lmm = lmm_config_from_json(j.at("lmm"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid estimate config: ") + e.what());
    }
    return o;
}

json cmd_estimate(const EstimateOptions& options) {
    const auto counts = read_counts_file(options.input);
    Rng rng = derive_stream(options.seed, 0);
    const auto est = lmm_estimate(counts, options.lmm, rng);
    json out;
    out["config"] = options.to_json();
    out["estimate"] = est.values.values();
    out["diagnostics"] = to_json(est.diagnostics);
    return out;
}

FunctionalSpec FunctionalOptions::spec() const {
    if (functional == "entropy") return FunctionalSpec::entropy();
    if (functional == "power_sum") return FunctionalSpec::power_sum(alpha);
    if (functional == "support_size") {
        if (k_bar == 0) throw ConfigError("support_size needs --k-bar");
        return FunctionalSpec::support_size(k_bar);
    }
    throw ConfigError("unknown functional '" + functional + "'");
}

json FunctionalOptions::to_json() const {
    json j;
    j["command"] = "functional";
    j["input"] = input;
    j["functional"] = functional;
    j["alpha"] = alpha;
    j["k_bar"] = k_bar;
    j["seed"] = seed;
    j["lmm"] = cli::to_json(lmm);
    return j;
}

FunctionalOptions FunctionalOptions::from_json(const json& j) {
    FunctionalOptions o;
    try {
        o.input = j.at("input").get<std::string>();
        o.functional = j.at("functional").get<std::string>();
        o.alpha = j.value("alpha", o.alpha);
        o.k_bar = j.value("k_bar", o.k_bar);
        o.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("lmm")) o.lmm = lmm_config_from_json(j.at("lmm"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid functional config: ") + e.what());
    }
    return o;
}

json cmd_functional(const FunctionalOptions& options) {
    const auto spec = options.spec();
    const auto counts = read_counts_file(options.input);
    Rng rng = derive_stream(options.seed, 0);
    const auto est = estimate_functional(counts, options.lmm, spec, rng);
    json out;
    out["config"] = options.to_json();
    out["lmm_value"] = est.value;
    out["baseline_value"] = baseline_functional(counts, spec);
    out["diagnostics"] = to_json(est.diagnostics);
    return out;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Local moment matching estimators for sorted distributions and symmetric functionals"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo risk of estimators on a benchmark family");
    SimulateOptions so;
    std::string sim_estimators = "lmm,empirical";
    std::string sim_model = "poissonized";
    std::string sim_csv, sim_json, sim_config;
    LmmFlags sim_flags;
    sim->add_option("--family", so.family, "uniform | zipf:<s> | two_level:<fraction>,<ratio> | dirichlet:<alpha>");
    sim->add_option("--S", so.support, "support size");
    sim->add_option("--n", so.n, "sample size / Poisson rate");
    sim->add_option("--trials", so.trials, "number of trials");
    sim->add_option("--estimators", sim_estimators, "comma-separated: lmm, empirical, oracle");
    sim->add_option("--model", sim_model, "poissonized | multinomial");
    sim->add_option("--seed", so.seed, "root seed");
    sim->add_option("--threads", so.threads, "worker threads (default LMM_THREADS or all cores)");
    sim->add_option("--csv", sim_csv, "per-trial CSV output path");
    sim->add_option("--json", sim_json, "aggregate JSON output path");
    sim->add_option("--config", sim_config, "rerun from the config embedded in a previous JSON output");
    sim_flags.attach(sim);

    // sample
    auto* smp = app.add_subcommand("sample", "Draw a counts file from a benchmark family");
    std::string smp_family = "uniform", smp_model = "poissonized", smp_out;
    std::size_t smp_support = 1000;
    double smp_n = 1000;
    std::uint64_t smp_seed = 0;
    smp->add_option("--family", smp_family, "distribution family");
    smp->add_option("--S", smp_support, "support size");
    smp->add_option("--n", smp_n, "sample size / Poisson rate");
    smp->add_option("--model", smp_model, "poissonized | multinomial");
    smp->add_option("--seed", smp_seed, "seed");
    smp->add_option("--output", smp_out, "counts file path (default stdout)");

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate the sorted distribution from a counts file");
    EstimateOptions eo;
    std::string est_out, est_config;
    LmmFlags est_flags;
    est->add_option("--input", eo.input, "counts file");
    est->add_option("--seed", eo.seed, "seed");
    est->add_option("--output", est_out, "JSON output path (default stdout)");
    est->add_option("--config", est_config, "rerun from the config embedded in a previous JSON output");
    est_flags.attach(est);

    // functional
    auto* fun = app.add_subcommand("functional", "Plug-in estimate of a symmetric functional from a counts file");
    FunctionalOptions fo;
    std::string fun_out, fun_config;
    LmmFlags fun_flags;
    fun->add_option("--input", fo.input, "counts file");
    fun->add_option("--functional", fo.functional, "entropy | power_sum | support_size");
    fun->add_option("--alpha", fo.alpha, "power sum exponent in (0, 1)");
    fun->add_option("--k-bar", fo.k_bar, "support size: nonzero masses are >= 1/k-bar");
    fun->add_option("--seed", fo.seed, "seed");
    fun->add_option("--output", fun_out, "JSON output path (default stdout)");
    fun->add_option("--config", fun_config, "rerun from the config embedded in a previous JSON output");
    fun_flags.attach(fun);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*sim) {
            if (!sim_config.empty()) {
                const auto threads = so.threads;
                so = SimulateOptions::from_json(read_json_file(sim_config));
                so.threads = threads;
            } else {
                so.estimators = split_list(sim_estimators);
                so.model = parse_model(sim_model);
                so.lmm = sim_flags.apply(so.lmm);
                so.lmm.seed = so.seed;
            }
            const auto result = cmd_simulate(so);
            if (!sim_csv.empty()) write_text(sim_csv, result.csv);
            const std::string summary = result.summary.dump(2) + "\n";
            if (!sim_json.empty()) write_text(sim_json, summary);
            if (sim_csv.empty() && sim_json.empty()) std::cout << summary;
        } else if (*smp) {
            const auto family = Family::parse(smp_family);
            const auto dist = benchmark_distribution(family, smp_support, smp_seed);
            Rng rng = derive_stream(smp_seed, 0);
            const auto counts = draw_counts(dist, smp_n, parse_model(smp_model), rng);
            std::ostringstream os;
            write_counts(os, counts);
            write_text(smp_out, os.str());
        } else if (*est) {
            if (!est_config.empty()) {
                eo = EstimateOptions::from_json(read_json_file(est_config));
            } else {
                if (eo.input.empty()) throw ConfigError("--input is required");
                eo.lmm = est_flags.apply(eo.lmm);
                eo.lmm.seed = eo.seed;
            }
            write_text(est_out, cmd_estimate(eo).dump(2) + "\n");
        } else if (*fun) {
            if (!fun_config.empty()) {
                fo = FunctionalOptions::from_json(read_json_file(fun_config));
            } else {
                if (fo.input.empty()) throw ConfigError("--input is required");
                fo.lmm = fun_flags.apply(fo.lmm);
                fo.lmm.seed = fo.seed;
            }
            write_text(fun_out, cmd_functional(fo).dump(2) + "\n");
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}

}  // namespace lmm::cli
