#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "yule/error.hpp"
#include "yule/estimators.hpp"
#include "yule/hypothesis.hpp"
#include "yule/io.hpp"
#include "yule/mc.hpp"
#include "yule/normal.hpp"
#include "yule/sde.hpp"
#include "yule/theory.hpp"

namespace {

using nlohmann::json;

// Bad flags, config files or parameter values. Maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
void assign_from_json(T& ref, const json& j) {
    ref = j.get<T>();
}

template <>
void assign_from_json(std::vector<double>& ref, const json& j) {
    if (j.is_array())
        ref = j.get<std::vector<double>>();
    else
        ref = {j.get<double>()};
}

// Flags of one subcommand, settable from the command line or a JSON config
// file whose keys are the flag names without dashes.
class Params {
public:
    explicit Params(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_path_, "JSON config file; flags override its values");
    }

    template <class T>
    CLI::Option* add(const std::string& key, T& ref, const std::string& desc, bool has_default = true) {
        auto* opt = app_->add_option("--" + key, ref, desc);
        if (has_default) opt->capture_default_str();
        entries_.push_back({key, opt, [&ref](const json& j) { assign_from_json(ref, j); },
                            [&ref] { return json(ref); }, has_default, false});
        return opt;
    }

    CLI::Option* flag(const std::string& key, bool& ref, const std::string& desc) {
        auto* opt = app_->add_flag("--" + key, ref, desc);
        entries_.push_back({key, opt, [&ref](const json& j) { ref = j.get<bool>(); }, [&ref] { return json(ref); },
                            true, false});
        return opt;
    }

    void load_config() {
        if (config_path_.empty()) return;
        std::ifstream in(config_path_);
        if (!in) throw ConfigError("cannot open config file '" + config_path_ + "'");
        json file;
        try {
            file = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("config file '" + config_path_ + "' is not valid JSON: " + e.what());
        }
        if (!file.is_object()) throw ConfigError("config file must contain a JSON object");
        for (const auto& [key, value] : file.items()) {
            auto* e = find(key);
            if (!e) throw ConfigError("unknown config key '" + key + "'");
            if (e->opt->count() > 0) continue;
            try {
                e->from_json(value);
            } catch (const json::exception&) {
                throw ConfigError("config key '" + key + "' has the wrong type");
            }
            e->from_file = true;
        }
    }

    bool given(const std::string& key) const {
        const auto* e = find(key);
        return e && (e->opt->count() > 0 || e->from_file);
    }

    void require(const std::string& key) const {
        if (!given(key)) throw ConfigError("missing required flag --" + key);
    }

    json effective() const {
        json j = json::object();
        j["command"] = app_->get_name();
        for (const auto& e : entries_)
            if (e.has_default || e.opt->count() > 0 || e.from_file) j[e.key] = e.to_json();
        return j;
    }

private:
    struct Entry {
        std::string key;
        CLI::Option* opt;
        std::function<void(const json&)> from_json;
        std::function<json()> to_json;
        bool has_default;
        bool from_file;
    };

    Entry* find(const std::string& key) {
        for (auto& e : entries_)
            if (e.key == key) return &e;
        return nullptr;
    }
    const Entry* find(const std::string& key) const { return const_cast<Params*>(this)->find(key); }

    CLI::App* app_;
    std::string config_path_;
    std::vector<Entry> entries_;
};

// Writes `content` to `path`, or stdout for "" and "-". Content is produced in
// full before this is called, so failures never leave partial files.
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

yule::PairSeries load_pair(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    return yule::read_pair_csv(in);
}

unsigned default_jobs() {
    if (const char* env = std::getenv("YULE_OU_JOBS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigError("YULE_OU_JOBS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs `validate` with domain errors reported as configuration errors.
template <class Fn>
auto validated(Fn&& fn) {
    try {
        return fn();
    } catch (const yule::DomainError& e) {
        throw ConfigError(e.what());
    }
}

struct SimulateCmd {
    double theta = 1.0, r = 0.0, T = 1.0, dt = 0.0, step_cap = yule::kDefaultStepCap;
    std::uint64_t seed = 0, replication = 0;
    std::string output;
    std::unique_ptr<Params> params;

    void setup(CLI::App& root) {
        auto* app = root.add_subcommand("simulate", "Simulate a correlated OU pair and write it as CSV");
        params = std::make_unique<Params>(app);
        params->add("theta", theta, "Mean-reversion rate (required)", false);
        params->add("r", r, "Correlation of the driving noises");
        params->add("T", T, "Horizon (required)", false);
        params->add("dt", dt, "Grid step; default is the largest admissible step dividing T", false);
        params->add("step-cap", step_cap, "Largest admissible theta*dt");
        params->add("seed", seed, "Experiment seed");
        params->add("replication", replication, "Replication index of the random streams");
        params->add("output", output, "Output CSV path ('-' for stdout)")->option_text("PATH");
    }

    int run() {
        params->load_config();
        params->require("theta");
        params->require("T");
        const auto cfg = validated([&] {
            yule::CorrelatedPairConfig c;
            c.theta = theta;
            c.r = r;
            c.horizon = T;
            c.step_cap = step_cap;
            c.dt = params->given("dt") ? dt : yule::fitted_step(theta, T, step_cap);
            c.seed = seed;
            c.validate();
            return c;
        });
        auto eff = params->effective();
        eff["dt"] = cfg.dt;
        std::ostringstream out;
        out << yule::config_comment(eff) << '\n';
        yule::write_pair_csv(out, yule::simulate_correlated_pair(cfg, replication));
        emit(output, out.str());
        return 0;
    }
};

struct StatCmd {
    std::string input, output, theta_source = "first_path";
    std::unique_ptr<Params> params;

    void setup(CLI::App& root) {
        auto* app = root.add_subcommand("stat", "Compute the path functionals and Yule's rho of a pair CSV");
        params = std::make_unique<Params>(app);
        params->add("input", input, "Pair CSV with header t,x1,x2 (required)", false);
        params->add("theta-source", theta_source, "first_path or pooled");
        params->add("output", output, "Output JSON path ('-' for stdout)");
    }

    int run() {
        params->load_config();
        params->require("input");
        const auto source = validated([&] {
            if (theta_source == "first_path") return yule::ThetaHatSource::first_path;
            if (theta_source == "pooled") return yule::ThetaHatSource::pooled;
            throw yule::DomainError("--theta-source must be first_path or pooled");
        });
        const auto pair = load_pair(input);
        const auto stats = yule::yule_rho(pair.x1, pair.x2, source);
        json j;
        j["config"] = params->effective();
        j["statistics"] = yule::to_json(stats);
        j["numerator_statistic"] = yule::numerator_statistic(pair.x1, pair.x2);
        emit(output, j.dump(2) + "\n");
        return 0;
    }
};

struct TestCmd {
    std::string variant = "rho", format = "json", output;
    std::vector<std::string> inputs;
    double alpha = 0.05, theta = 1.0, r = std::numeric_limits<double>::quiet_NaN();
    bool ci = false;
    std::unique_ptr<Params> params;

    void setup(CLI::App& root) {
        auto* app = root.add_subcommand("test", "Test H0: r = 0 on one or more pair CSVs");
        params = std::make_unique<Params>(app);
        params->add("variant", variant, "rho, rho-est or numerator");
        params->add("alpha", alpha, "Significance level");
        params->add("theta", theta, "Known mean-reversion rate (required unless --variant rho-est)", false);
        params->add("input", inputs, "Pair CSV file(s) (required)", false);
        params->add("r", r, "True r recorded in the CSV output column", false);
        params->flag("ci", ci, "Also report the confidence interval for r");
        params->add("format", format, "json or csv");
        params->add("output", output, "Output path ('-' for stdout)");
    }

    int run() {
        params->load_config();
        params->require("input");
        const auto v = validated([&] {
            const auto parsed = yule::parse_test_variant(variant);
            if (format != "json" && format != "csv") throw yule::DomainError("--format must be json or csv");
            yule::two_sided_critical_value(alpha);
            return parsed;
        });
        const bool needs_theta = v != yule::TestVariant::rho_estimated_theta;
        if (needs_theta || ci) {
            if (needs_theta) params->require("theta");
            if (params->given("theta") && !(theta > 0.0)) throw ConfigError("--theta must be positive");
        }
        std::vector<yule::OutcomeRow> rows;
        json results = json::array();
        for (const auto& path : inputs) {
            const auto pair = load_pair(path);
            const auto stats = yule::yule_rho(pair.x1, pair.x2);
            const auto outcome = yule::run_test(v, stats, theta, alpha);
            const double th = needs_theta ? theta : stats.theta_hat;
            rows.push_back({outcome, th, r, stats.horizon});
            json j = yule::to_json(outcome);
            j["input"] = path;
            j["statistics"] = yule::to_json(stats);
            if (ci) {
                const auto mode = needs_theta ? yule::ThetaMode::known : yule::ThetaMode::estimated;
                j["confidence_interval"] = yule::to_json(yule::confidence_interval_r(stats, alpha, mode, theta));
            }
            results.push_back(std::move(j));
        }
        std::ostringstream out;
        if (format == "csv") {
            out << yule::config_comment(params->effective()) << '\n';
            yule::write_outcome_csv(out, rows);
        } else {
            json doc = results.size() == 1 ? results[0] : json{{"results", results}};
            doc["config"] = params->effective();
            out << doc.dump(2) << '\n';
        }
        emit(output, out.str());
        return 0;
    }
};

struct McCmd {
    std::vector<double> thetas{1.0}, rs{0.0}, horizons{100.0};
    double dt = 0.0, step_cap = yule::kDefaultStepCap, alpha = 0.05;
    std::size_t reps = 1000, max_nodes = 20'000'000;
    std::uint64_t seed = 0;
    std::string statistic = "rho_centered", variant = "rho", output, jsonl;
    unsigned jobs = 1;
    bool quiet = false;
    std::unique_ptr<Params> params;

    void setup(CLI::App& root) {
        auto* app = root.add_subcommand("mc", "Monte Carlo over a (theta, r, T) grid; writes one CSV row per cell");
        params = std::make_unique<Params>(app);
        params->add("theta", thetas, "Theta values (comma separated)")->delimiter(',');
        params->add("r", rs, "r values (comma separated)")->delimiter(',');
        params->add("T", horizons, "Horizons (comma separated)")->delimiter(',');
        params->add("dt", dt, "Fixed grid step for every cell; default fits each cell to the step cap", false);
        params->add("step-cap", step_cap, "Largest admissible theta*dt");
        params->add("reps", reps, "Replications per cell");
        params->add("seed", seed, "Base seed");
        params->add("statistic", statistic, "rho_centered, numerator_centered, theta_hat_centered or ybar_centered");
        params->add("variant", variant, "Test whose rejection rate is reported: rho, rho-est or numerator");
        params->add("alpha", alpha, "Significance level of the test");
        params->add("max-nodes", max_nodes, "Cells needing longer paths are skipped with a diagnostic");
        params->add("output", output, "Report CSV path ('-' for stdout)");
        params->add("jsonl", jsonl, "Optional JSON-lines mirror of the report", false);
        params->add("jobs", jobs, "Worker threads (default: YULE_OU_JOBS or the core count)", false);
        params->flag("quiet", quiet, "No progress output on stderr");
    }

    int run() {
        params->load_config();
        if (!params->given("jobs")) jobs = default_jobs();
        if (jobs < 1) throw ConfigError("--jobs must be positive");
        const auto grid = validated([&] {
            yule::ExperimentGrid g;
            g.thetas = thetas;
            g.rs = rs;
            g.horizons = horizons;
            g.dt_policy.step_cap = step_cap;
            if (params->given("dt")) g.dt_policy.fixed_dt = dt;
            g.replications = reps;
            g.base_seed = seed;
            g.statistic = yule::parse_statistic(statistic);
            g.test_variant = yule::parse_test_variant(variant);
            g.alpha = alpha;
            g.validate();
            for (const auto& cell : yule::grid_cells(g)) {
                yule::CorrelatedPairConfig c;
                c.theta = cell.theta;
                c.r = cell.r;
                c.horizon = cell.horizon;
                c.step_cap = step_cap;
                c.dt = g.dt_policy.step_for(cell.theta, cell.horizon);
                c.validate();
            }
            return g;
        });
        yule::RunOptions opts;
        opts.jobs = jobs;
        opts.max_path_nodes = max_nodes;
        if (!quiet)
            opts.progress = [](std::size_t done, std::size_t total) {
                std::cerr << "mc: cell " << done << "/" << total << " done\n";
            };
        const auto reports = yule::run_grid(grid, opts);
        auto eff = params->effective();
        eff.erase("jobs");
        eff.erase("quiet");
        int status = 0;
        for (const auto& rep : reports)
            if (!rep.ok) {
                std::cerr << "mc: cell (theta=" << rep.theta << ", r=" << rep.r << ", T=" << rep.horizon
                          << ") failed: " << rep.diagnostic << "\n";
                status = 1;
            }
        std::ostringstream out;
        out << yule::config_comment(eff) << '\n';
        yule::write_mc_csv(out, reports);
        emit(output, out.str());
        if (!jsonl.empty()) {
            std::ostringstream mirror;
            yule::write_mc_jsonl(mirror, reports);
            emit(jsonl, mirror.str());
        }
        return status;
    }
};

struct SpdeCmd {
    std::size_t n_modes = 1, reps = 1000;
    double r = 0.0, T = 50.0, alpha = 0.05, step_cap = yule::kDefaultStepCap;
    std::uint64_t seed = 0;
    std::string variant = "rho", statistic = "rho_centered", output, modes_csv, outcomes_csv;
    bool sidak = false;
    unsigned jobs = 1;
    std::unique_ptr<Params> params;

    void setup(CLI::App& root) {
        auto* app = root.add_subcommand("spde", "Multi-mode test on the Fourier modes of the stochastic heat equation");
        params = std::make_unique<Params>(app);
        params->add("N", n_modes, "Number of Fourier modes");
        params->add("r", r, "Correlation of the driving noises");
        params->add("T", T, "Horizon");
        params->add("alpha", alpha, "Significance level");
        params->add("reps", reps, "Replications");
        params->add("seed", seed, "Base seed");
        params->add("variant", variant, "Per-mode test: rho, rho-est or numerator");
        params->add("statistic", statistic, "Standardized statistic summarized per mode");
        params->add("step-cap", step_cap, "Largest admissible theta*dt");
        params->flag("sidak", sidak, "Use per-mode level 1-(1-alpha)^(1/N)");
        params->add("output", output, "Summary JSON path ('-' for stdout)");
        params->add("modes-csv", modes_csv, "Per-mode report CSV", false);
        params->add("outcomes-csv", outcomes_csv, "Per-replication, per-mode test outcomes CSV", false);
        params->add("jobs", jobs, "Worker threads (default: YULE_OU_JOBS or the core count)", false);
    }

    int run() {
        params->load_config();
        if (!params->given("jobs")) jobs = default_jobs();
        if (jobs < 1) throw ConfigError("--jobs must be positive");
        const auto ex = validated([&] {
            yule::SpdeExperiment e;
            e.n_modes = n_modes;
            e.r = r;
            e.horizon = T;
            e.alpha = alpha;
            e.variant = yule::parse_test_variant(variant);
            e.statistic = yule::parse_statistic(statistic);
            e.sidak = sidak;
            e.replications = reps;
            e.base_seed = seed;
            e.step_cap = step_cap;
            e.validate();
            for (std::size_t k = 1; k <= n_modes; ++k) yule::fitted_step(double(k * k), T, step_cap);
            return e;
        });
        std::cerr << "spde: simulating " << reps << " replications of " << n_modes << " modes\n";
        const auto report = yule::run_spde(ex, jobs);
        auto eff = params->effective();
        eff.erase("jobs");
        json doc;
        doc["config"] = eff;
        doc["family_reject_rate"] = yule::to_json(report.family);
        doc["per_mode_alpha"] = report.per_mode_alpha;
        doc["per_mode"] = json::array();
        for (const auto& m : report.per_mode) doc["per_mode"].push_back(yule::to_json(m));
        if (!report.outcomes.empty()) doc["first_replication"] = yule::to_json(report.outcomes.front());
        const std::string header = yule::config_comment(eff) + "\n";
        std::string modes_text, outcomes_text;
        if (!modes_csv.empty()) {
            std::ostringstream out;
            out << header;
            yule::write_mc_csv(out, report.per_mode);
            modes_text = out.str();
        }
        if (!outcomes_csv.empty()) {
            std::vector<yule::OutcomeRow> rows;
            for (const auto& o : report.outcomes)
                for (std::size_t k = 0; k < o.per_mode.size(); ++k)
                    rows.push_back({o.per_mode[k], double((k + 1) * (k + 1)), r, T});
            std::ostringstream out;
            out << header;
            yule::write_outcome_csv(out, rows);
            outcomes_text = out.str();
        }
        emit(output, doc.dump(2) + "\n");
        if (!modes_csv.empty()) emit(modes_csv, modes_text);
        if (!outcomes_csv.empty()) emit(outcomes_csv, outcomes_text);
        return 0;
    }
};

struct TheoryCmd {
    std::string quantity;
    bool list = false;
    std::map<std::string, double> values;
    std::unique_ptr<Params> params;
    std::vector<std::string> keys{"theta", "r", "T", "p", "z", "n", "norm", "x", "C", "sigma"};

    void setup(CLI::App& root) {
        auto* app = root.add_subcommand("theory", "Evaluate a closed-form constant and print it as JSON");
        params = std::make_unique<Params>(app);
        params->add("quantity", quantity, "Name of the quantity (see --list)", false);
        params->flag("list", list, "List the available quantities and their parameters");
        for (const auto& k : keys) {
            values[k] = std::numeric_limits<double>::quiet_NaN();
            params->add(k, values[k], "Parameter " + k, false);
        }
    }

    int run() {
        params->load_config();
        if (list) {
            json arr = json::array();
            for (const auto& q : yule::theory::quantity_catalog())
                arr.push_back({{"quantity", q.name}, {"params", q.params}, {"summary", q.summary}});
            emit("", arr.dump(2) + "\n");
            return 0;
        }
        params->require("quantity");
        std::map<std::string, double> supplied;
        for (const auto& k : keys)
            if (params->given(k)) supplied[k] = values[k];
        const double value = validated([&] { return yule::theory::evaluate_quantity(quantity, supplied); });
        json doc{{"quantity", quantity}, {"params", supplied}, {"value", value}};
        emit("", doc.dump(2) + "\n");
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Yule's nonsense correlation for OU processes: simulation, statistics, tests and Monte Carlo"};
    app.require_subcommand(1);
    SimulateCmd simulate;
    StatCmd stat;
    TestCmd test;
    McCmd mc;
    SpdeCmd spde;
    TheoryCmd theory;
    simulate.setup(app);
    stat.setup(app);
    test.setup(app);
    mc.setup(app);
    spde.setup(app);
    theory.setup(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "simulate") return simulate.run();
        if (name == "stat") return stat.run();
        if (name == "test") return test.run();
        if (name == "mc") return mc.run();
        if (name == "spde") return spde.run();
        if (name == "theory") return theory.run();
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
