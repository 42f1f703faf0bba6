#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ouharvest::app {

using nlohmann::json;

namespace {

std::string num(double v) { return show_value(v); }

double get_real(const json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_number()) throw ConfigError(std::string("/") + key + ": expected a number, got " + v.type_name());
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(std::string("/") + key + ": must be finite");
    return d;
}

std::uint64_t get_unsigned(const json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        throw ConfigError(std::string("/") + key + ": must be non-negative, got " + v.dump());
    }
    throw ConfigError(std::string("/") + key + ": expected an unsigned integer, got " + v.dump());
}

bool get_bool(const json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_boolean()) throw ConfigError(std::string("/") + key + ": expected true or false, got " + v.dump());
    return v.get<bool>();
}

std::string get_string(const json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_string()) throw ConfigError(std::string("/") + key + ": expected a string, got " + v.dump());
    return v.get<std::string>();
}

const char* const kRequired[] = {"a", "b", "eta", "x0", "theta", "seed", "horizon"};
const char* const kOptional[] = {"h",           "replications",  "quad_abs_tol",        "bridge_correction",
                                 "output_path", "output_format", "allow_nonnegative_a", "step_cap"};

bool known_key(const std::string& k) {
    for (const char* r : kRequired) if (k == r) return true;
    for (const char* o : kOptional) if (k == o) return true;
    return false;
}

}  // namespace

const char* to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

OutputFormat parse_output_format(std::string_view s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw ConfigError("output_format: expected \"csv\" or \"json\", got \"" + std::string(s) + "\"");
}

OUParams RunConfig::params() const {
    return OUParams(a, b, allow_nonnegative_a ? DriftRegime::AnySign : DriftRegime::Consumption);
}

Corridor RunConfig::corridor() const { return Corridor(eta, x0, theta); }

FunctionalContext RunConfig::context(ExitTimeDenominator denominator) const {
    QuadratureSpec quad;
    quad.abs_tol = quad_abs_tol;
    return FunctionalContext(params(), eta, theta, quad, denominator);
}

FirstPassageOptions RunConfig::passage_options() const {
    FirstPassageOptions o;
    o.bridge_correction = bridge_correction;
    o.step_cap = step_cap;
    return o;
}

void RunConfig::validate() const {
    for (auto [key, v] : {std::pair{"a", a}, {"b", b}, {"eta", eta}, {"x0", x0}, {"theta", theta},
                          {"h", h}, {"horizon", horizon}, {"quad_abs_tol", quad_abs_tol}}) {
        if (!std::isfinite(v)) throw ConfigError(std::string(key) + "=" + num(v) + " must be finite");
    }
    try {
        params();
        corridor();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (!(h > 0.0)) throw ConfigError("h=" + num(h) + " must be > 0");
    if (!(horizon > 0.0)) throw ConfigError("horizon=" + num(horizon) + " must be > 0");
    if (!(quad_abs_tol > 0.0)) throw ConfigError("quad_abs_tol=" + num(quad_abs_tol) + " must be > 0");
    if (replications < 1) throw ConfigError("replications=0 must be >= 1");
    if (step_cap < 1) throw ConfigError("step_cap=0 must be >= 1");
}

RunConfig parse_config(std::string_view source) {
    json doc;
    try {
        doc = json::parse(source);
    } catch (const json::parse_error& e) {
        // The message carries the line and column.
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError(std::string("/: expected an object, got ") + doc.type_name());
    for (const auto& [key, _] : doc.items()) {
        if (!known_key(key)) throw ConfigError("/" + key + ": unknown key");
    }
    for (const char* key : kRequired) {
        if (!doc.contains(key)) throw ConfigError(std::string("/") + key + ": required key missing");
    }

    RunConfig c;
    c.a = get_real(doc, "a");
    c.b = get_real(doc, "b");
    c.eta = get_real(doc, "eta");
    c.x0 = get_real(doc, "x0");
    c.theta = get_real(doc, "theta");
    c.seed = get_unsigned(doc, "seed");
    c.horizon = get_real(doc, "horizon");
    if (doc.contains("h")) c.h = get_real(doc, "h");
    if (doc.contains("replications")) c.replications = get_unsigned(doc, "replications");
    if (doc.contains("quad_abs_tol")) c.quad_abs_tol = get_real(doc, "quad_abs_tol");
    if (doc.contains("bridge_correction")) c.bridge_correction = get_bool(doc, "bridge_correction");
    if (doc.contains("output_path")) c.output_path = get_string(doc, "output_path");
    if (doc.contains("output_format")) c.output_format = parse_output_format(get_string(doc, "output_format"));
    if (doc.contains("allow_nonnegative_a")) c.allow_nonnegative_a = get_bool(doc, "allow_nonnegative_a");
    if (doc.contains("step_cap")) c.step_cap = get_unsigned(doc, "step_cap");
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["a"] = c.a;
    j["b"] = c.b;
    j["eta"] = c.eta;
    j["x0"] = c.x0;
    j["theta"] = c.theta;
    j["h"] = c.h;
    j["horizon"] = c.horizon;
    j["seed"] = c.seed;
    j["replications"] = c.replications;
    j["quad_abs_tol"] = c.quad_abs_tol;
    j["bridge_correction"] = c.bridge_correction;
    j["output_path"] = c.output_path;
    j["output_format"] = to_string(c.output_format);
    j["allow_nonnegative_a"] = c.allow_nonnegative_a;
    j["step_cap"] = c.step_cap;
    return j;
}

const char* to_string(SweepParam p) {
    switch (p) {
        case SweepParam::Theta: return "theta";
        case SweepParam::Eta: return "eta";
        case SweepParam::X0: return "x0";
        case SweepParam::A: return "a";
        case SweepParam::B: return "b";
    }
    return "?";
}

SweepParam parse_sweep_param(std::string_view s) {
    for (auto p : {SweepParam::Theta, SweepParam::Eta, SweepParam::X0, SweepParam::A, SweepParam::B}) {
        if (s == to_string(p)) return p;
    }
    throw ConfigError("--sweep-param: expected one of theta, eta, x0, a, b; got \"" + std::string(s) + "\"");
}

void SweepSpec::validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("sweep bounds must be finite");
    if (!(lo < hi)) throw ConfigError("sweep lo=" + num(lo) + " must be < hi=" + num(hi));
    if (steps < 2) throw ConfigError("sweep steps=" + std::to_string(steps) + " must be >= 2");
}

double SweepSpec::point(std::uint64_t k) const {
    if (k + 1 == steps) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

RunConfig with_param(RunConfig c, SweepParam p, double value) {
    switch (p) {
        case SweepParam::Theta: c.theta = value; break;
        case SweepParam::Eta: c.eta = value; break;
        case SweepParam::X0: c.x0 = value; break;
        case SweepParam::A: c.a = value; break;
        case SweepParam::B: c.b = value; break;
    }
    return c;
}

}  // namespace ouharvest::app
