// Command-line entry point: experiment orchestration and reproducible
// emission of tables and plot data.
//
// Usage:
//   anderson <experiment> [--config file.cfg] [--seed N] [--threads N]
//            [--out path] [--format csv|json] [--set key=value ...]
//
// Exit codes: 0 ok, 2 config error, 3 numeric guard, 4 quadrature flag.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "anderson/experiments.hpp"

namespace {

int dispatch(const std::string& experiment, const std::string& config_path,
             const std::vector<std::string>& sets, anderson::cli::RunContext& ctx) {
    using anderson::cfg::ConfigError;
    try {
        anderson::cfg::KeyValues kv;
        if (!config_path.empty()) kv = anderson::cfg::parse_config_file(config_path);
        if (!kv.section.empty() && kv.section != experiment)
            throw ConfigError("ECONFIG", "config section [" + kv.section +
                                             "] does not match experiment " + experiment);
        for (const std::string& s : sets) {
            const size_t eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("ECONFIG", "--set expects key=value, got: " + s);
            kv.values[anderson::cfg::trim(s.substr(0, eq))] =
                anderson::cfg::trim(s.substr(eq + 1));
        }
        if (ctx.out_path.empty())
            ctx.out_path = experiment + (ctx.format == "json" ? ".json" : ".csv");
        return anderson::cli::run_experiment(experiment, kv, ctx);
    } catch (const ConfigError& e) {
        std::cerr << e.code << ": " << e.what() << "\n";
        return anderson::cli::kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ECONFIG: " << e.what() << "\n";
        return anderson::cli::kConfigError;
    } catch (const std::runtime_error& e) {
        std::cerr << "ENUMERIC: " << e.what() << "\n";
        return anderson::cli::kNumericGuard;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D stochastic wave/heat simulator with fractional noise"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv";
    uint64_t seed = 1;
    int threads = anderson::default_threads();
    std::vector<std::string> sets;

    app.add_option("--config", config_path, "experiment config file");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--threads", threads, "worker threads (1 = reference run)");
    app.add_option("--out", out_path, "output file path");
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--set", sets, "override config entries as key=value")
        ->take_all();

    const std::vector<std::string> experiments = {
        "constants", "covariance", "chaos-table", "solve",
        "holder",    "coupling",   "ks",          "tightness"};
    for (const auto& name : experiments)
        app.add_subcommand(name, "run the " + name + " experiment");

    CLI11_PARSE(app, argc, argv);

    anderson::cli::RunContext ctx;
    ctx.seed = seed;
    ctx.threads = threads;
    ctx.out_path = out_path;
    ctx.format = format;
    return dispatch(app.get_subcommands().front()->get_name(), config_path, sets, ctx);
}
