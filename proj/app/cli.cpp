#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"

namespace ouharvest::app {

namespace {

void error_record(std::ostream& err, const char* kind, const std::string& message, int code) {
    Json j{{"error", Json{{"kind", kind}, {"message", message}}}, {"exit_code", code}};
    err << j.dump() << "\n";
}

void emit(const CommandResult& r, const std::string& path, std::ostream& out, std::ostream& err) {
    if (path.empty()) {
        out << r.output;
    } else {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file '" + path + "'");
        f << r.output;
        if (!f.flush()) throw ConfigError("failed writing output file '" + path + "'");
    }
    err << r.log;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Harvest-policy analysis for a regenerated Ornstein-Uhlenbeck process", "ou-harvest"};

    std::string command;
    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::string sweep_param;
    std::optional<double> lo, hi;
    std::optional<std::uint64_t> steps;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::string denominator = "density";

    app.add_option("command", command, "evaluate | simulate | sign | sweep | validate")
        ->required()
        ->check(CLI::IsMember({"evaluate", "simulate", "sign", "sweep", "validate"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_path, "write the report here instead of stdout");
    app.add_option("--format", format, "csv or json (overrides the config)")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--sweep-param", sweep_param, "theta | eta | x0 | a | b");
    app.add_option("--lo", lo, "sweep lower end");
    app.add_option("--hi", hi, "sweep upper end");
    app.add_option("--steps", steps, "sweep grid size (>= 2)");
    app.add_option("--workers", workers, "worker threads; results do not depend on this")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--psi-denominator", denominator,
                   "density (default) or cdf; cdf divides by Phi, a known-wrong exit-time formula kept as a negative control")
        ->check(CLI::IsMember({"density", "cdf"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const bool sweeping = command == "sweep";
        const bool any_sweep = !sweep_param.empty() || lo || hi || steps;
        if (!sweeping && any_sweep) throw ConfigError("--sweep-param/--lo/--hi/--steps are only valid with sweep");
        if (sweeping && !(!sweep_param.empty() && lo && hi && steps)) {
            throw ConfigError("sweep requires --sweep-param, --lo, --hi and --steps");
        }

        RunConfig config = load_config(config_path);
        if (seed) config.seed = *seed;
        if (!format.empty()) config.output_format = parse_output_format(format);
        if (!out_path.empty()) config.output_path = out_path;

        CommandOptions opts;
        opts.workers = workers;
        opts.denominator =
            denominator == "cdf" ? ExitTimeDenominator::Cdf : ExitTimeDenominator::Density;

        CommandResult result;
        if (command == "evaluate") {
            result = cmd_evaluate(config, opts);
        } else if (command == "simulate") {
            result = cmd_simulate(config, opts);
        } else if (command == "sign") {
            result = cmd_sign(config, opts);
        } else if (command == "sweep") {
            SweepSpec spec{parse_sweep_param(sweep_param), *lo, *hi, *steps};
            result = cmd_sweep(config, spec, opts);
        } else {
            result = cmd_validate(config, opts);
        }
        emit(result, config.output_path, out, err);
        return result.exit_code;
    } catch (const ConfigError& e) {
        error_record(err, "config", e.what(), kExitConfig);
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        error_record(err, "config", e.what(), kExitConfig);
        return kExitConfig;
    } catch (const NonConvergence& e) {
        error_record(err, "non_convergence", e.what(), kExitNonConvergence);
        return kExitNonConvergence;
    } catch (const InsufficientData& e) {
        error_record(err, "non_convergence", e.what(), kExitNonConvergence);
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        error_record(err, "internal", e.what(), 1);
        return 1;
    }
}

}  // namespace ouharvest::app
