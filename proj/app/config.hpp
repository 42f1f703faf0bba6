#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ouharvest/functionals.hpp"
#include "ouharvest/ou_model.hpp"

namespace ouharvest::app {

// Bad or inconsistent user input. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

const char* to_string(OutputFormat f);
OutputFormat parse_output_format(std::string_view s);

struct RunConfig {
    double a = 0.0;
    double b = 0.0;
    double eta = 0.0;
    double x0 = 0.0;
    double theta = 0.0;
    double h = 1e-4;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t replications = 1;
    double quad_abs_tol = 1e-10;
    bool bridge_correction = false;
    std::string output_path;
    OutputFormat output_format = OutputFormat::Json;
    // Beyond the documented schema: escape hatches for experiments.
    bool allow_nonnegative_a = false;
    std::uint64_t step_cap = 1'000'000'000;

    OUParams params() const;
    Corridor corridor() const;
    FunctionalContext context(ExitTimeDenominator denominator = ExitTimeDenominator::Density) const;
    FirstPassageOptions passage_options() const;

    // Re-runs every invariant check; throws ConfigError.
    void validate() const;
};

// Parses and validates a JSON document. Unknown keys are rejected.
RunConfig parse_config(std::string_view source);
RunConfig load_config(const std::string& path);

nlohmann::ordered_json to_json(const RunConfig& config);

enum class SweepParam { Theta, Eta, X0, A, B };

const char* to_string(SweepParam p);
SweepParam parse_sweep_param(std::string_view s);

struct SweepSpec {
    SweepParam param = SweepParam::Theta;
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t steps = 2;

    void validate() const;
    // lo + (hi - lo) k / (steps - 1); the last point is hi exactly.
    double point(std::uint64_t k) const;
};

// Copy of `config` with the swept field replaced; not validated.
RunConfig with_param(RunConfig config, SweepParam p, double value);

}  // namespace ouharvest::app
