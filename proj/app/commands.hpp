#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "ouharvest/renewal.hpp"
#include "report.hpp"
#include "validation.hpp"

namespace ouharvest::app {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNonConvergence = 3,
    kExitValidation = 4,
};

struct CommandOptions {
    unsigned workers = 1;
    ExitTimeDenominator denominator = ExitTimeDenominator::Density;
    ValidationPlan plan;
};

struct CommandResult {
    std::string output;  // report body, destined for --out or stdout
    std::string log;     // human-oriented summary, destined for stderr
    int exit_code = kExitOk;
};

struct Replication {
    RenewalRunStats stats;
    bool aborted = false;
    std::string abort_message;
};

// Replication i draws from stream_id(Renewal, i) under config.seed.
std::vector<Replication> run_replications(const RunConfig& config, double horizon, std::uint64_t count,
                                          unsigned workers);

CommandResult cmd_evaluate(const RunConfig& config, const CommandOptions& opts = {});
CommandResult cmd_simulate(const RunConfig& config, const CommandOptions& opts = {});
CommandResult cmd_sign(const RunConfig& config, const CommandOptions& opts = {});
CommandResult cmd_sweep(const RunConfig& config, const SweepSpec& spec, const CommandOptions& opts = {});
CommandResult cmd_validate(const RunConfig& config, const CommandOptions& opts = {});

// Fixed column order of the sweep table.
const std::vector<std::string>& sweep_header();

}  // namespace ouharvest::app
