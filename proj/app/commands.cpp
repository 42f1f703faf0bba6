#include "commands.hpp"

#include <cmath>
#include <sstream>

#include "ouharvest/monte_carlo.hpp"
#include "ouharvest/parallel.hpp"
#include "ouharvest/sign_analysis.hpp"

namespace ouharvest::app {

namespace {

const char* denominator_name(ExitTimeDenominator d) {
    return d == ExitTimeDenominator::Density ? "density" : "cdf";
}

HarvestPolicy policy_for(const RunConfig& c) { return HarvestPolicy::displacement(c.eta, c.x0, c.theta); }

std::string render(const RunConfig& config, const Json& results, const Json& diagnostics) {
    return dump(make_report(config, results, diagnostics));
}

Json gamma_json(const ClosedFormGamma& g) {
    return Json{{"value", g.value},
                {"numerator", g.numerator},
                {"psi_prime", g.psi_prime},
                {"psi_prime_error", g.psi_prime_error},
                {"reliable", g.reliable}};
}

Json limit_json(const NumericLimit& n) {
    return Json{{"value", n.value},     {"error", n.error},   {"status", to_string(n.status)},
                {"offsets", n.offsets}, {"ratios", n.ratios}, {"residuals", n.residuals}};
}

Json verdict_json(const SignVerdict& v) {
    Json j;
    j["case"] = to_string(v.limit_case);
    j["surrogate"] = v.surrogate_value;
    if (v.limit_case == LimitCase::BUpper) j["surrogate_uncorrected"] = v.surrogate_uncorrected;
    j["gamma_closed"] = gamma_json(v.gamma_closed);
    j["gamma_numeric"] = limit_json(v.gamma_numeric);
    j["in_dead_band"] = v.in_dead_band;
    j["signs_agree"] = v.signs_agree;
    if (v.limit_case == LimitCase::ALower) j["in_positivity_region"] = v.in_positivity_region;
    j["reliable"] = v.reliable;
    return j;
}

}  // namespace

std::vector<Replication> run_replications(const RunConfig& config, double horizon, std::uint64_t count,
                                          unsigned workers) {
    const auto params = config.params();
    const auto corridor = config.corridor();
    const auto policy = policy_for(config);
    const auto opts = config.passage_options();
    return parallel_map<Replication>(count, workers, [&](std::size_t i) {
        RngStream stream(config.seed, stream_id(StreamDomain::Renewal, i));
        Replication r;
        try {
            r.stats = simulate_renewal(corridor, policy, horizon, config.h, params, stream, opts);
        } catch (const RenewalAborted& e) {
            r.stats = e.partial();
            r.aborted = true;
            r.abort_message = e.what();
        }
        return r;
    });
}

CommandResult cmd_evaluate(const RunConfig& config, const CommandOptions& opts) {
    const auto ctx = config.context(opts.denominator);
    const auto scale = alpha_beta(config.params());
    const auto policy = policy_for(config);
    const double r = rho(ctx, config.x0);
    const double p = psi(ctx, config.x0);
    const double reward = expected_reward(ctx, config.x0, policy);
    const double ratio = expected_ratio(ctx, config.x0, policy);

    CommandResult out;
    if (config.output_format == OutputFormat::Csv) {
        CsvTable t({"alpha", "beta", "drift_equilibrium", "rho_x0", "psi_x0", "expected_reward", "expected_time",
                    "ratio"});
        t.add_row({cell(scale.alpha), cell(scale.beta), cell(config.params().drift_equilibrium()), cell(r), cell(p),
                   cell(reward), cell(p), cell(ratio)});
        out.output = t.str();
        return out;
    }
    Json results{{"alpha", scale.alpha},
                 {"beta", scale.beta},
                 {"drift_equilibrium", config.params().drift_equilibrium()},
                 {"rho_x0", r},
                 {"psi_x0", p},
                 {"expected_reward", reward},
                 {"expected_time", p},
                 {"ratio", ratio}};
    Json diagnostics{{"policy", "Q(y) = y - x0"},
                     {"psi_denominator", denominator_name(opts.denominator)},
                     {"quad_abs_tol", ctx.quadrature().abs_tol},
                     {"quad_rel_tol", ctx.quadrature().rel_tol}};
    out.output = render(config, results, diagnostics);
    return out;
}

CommandResult cmd_simulate(const RunConfig& config, const CommandOptions& opts) {
    const auto ctx = config.context(opts.denominator);
    const double analytic = expected_ratio(ctx, config.x0, policy_for(config));
    const auto reps = run_replications(config, config.horizon, config.replications, opts.workers);

    std::vector<RenewalRunStats> runs;
    Json rep_json = Json::array();
    Json aborts = Json::array();
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const auto& s = reps[i].stats;
        runs.push_back(s);
        rep_json.push_back(Json{{"index", i},
                                {"stream_id", stream_id(StreamDomain::Renewal, i)},
                                {"horizon", s.horizon},
                                {"n_cycles", s.n_cycles},
                                {"lower_cycles", s.lower_cycles()},
                                {"total_reward", s.total_reward},
                                {"time_average", s.time_average},
                                {"completed_time", s.completed_time()},
                                {"aborted", reps[i].aborted}});
        if (reps[i].aborted) aborts.push_back(Json{{"index", i}, {"message", reps[i].abort_message}});
    }

    Json pooled = nullptr;
    bool insufficient = false;
    std::string insufficient_msg;
    try {
        const auto check = renewal_theorem_check(runs, analytic);
        const double rel = check.standard_error / std::abs(check.analytic_ratio);
        pooled = Json{{"n_cycles", check.n_cycles},
                      {"horizon", check.horizon},
                      {"time_average", check.time_average},
                      {"standard_error", check.standard_error},
                      {"relative_standard_error", rel},
                      {"difference", check.difference},
                      {"z_score", check.z_score()},
                      {"within_3_standard_errors", check.z_score() <= 3.0}};
    } catch (const InsufficientData& e) {
        insufficient = true;
        insufficient_msg = e.what();
    }

    Json results{{"analytic_ratio", analytic},
                 {"insufficient_cycles", insufficient},
                 {"pooled", pooled},
                 {"replications", rep_json}};
    Json diagnostics{{"cycle_index", "cycles are numbered from 0 within each replication; the final incomplete "
                                     "cycle of each replication is dropped but its time still counts"},
                     {"min_cycles_for_check", kMinCyclesForCheck},
                     {"psi_denominator", denominator_name(opts.denominator)},
                     {"aborted", aborts}};
    if (insufficient) diagnostics["insufficient_cycles"] = insufficient_msg;

    CommandResult out;
    out.exit_code = aborts.empty() ? kExitOk : kExitNonConvergence;

    std::ostringstream log;
    if (insufficient) {
        log << "insufficient cycles: " << insufficient_msg << "\n";
    } else {
        log << "pooled R(t)/t " << format_real(pooled["time_average"].get<double>()) << ", analytic "
            << format_real(analytic) << ", standard error " << format_real(pooled["standard_error"].get<double>())
            << ", z " << format_real(pooled["z_score"].get<double>()) << "\n";
    }
    for (const auto& a : aborts) log << "replication " << a["index"].get<std::size_t>() << " aborted: "
                                     << a["message"].get<std::string>() << "\n";
    out.log = log.str();

    if (config.output_format == OutputFormat::Csv) {
        CsvTable t({"replication", "cycle", "boundary", "duration", "reward"});
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto& cycles = runs[i].cycles;
            for (std::size_t k = 0; k < cycles.size(); ++k) {
                t.add_row({cell(std::uint64_t{i}), cell(std::uint64_t{k}), to_string(cycles[k].boundary),
                           cell(cycles[k].duration), cell(cycles[k].reward)});
            }
        }
        out.output = t.str();
    } else {
        out.output = render(config, results, diagnostics);
    }
    return out;
}

CommandResult cmd_sign(const RunConfig& config, const CommandOptions& opts) {
    const auto ctx = config.context(opts.denominator);
    const auto report = sign_report(ctx);

    CommandResult out;
    if (config.output_format == OutputFormat::Csv) {
        CsvTable t({"case", "surrogate", "surrogate_uncorrected", "gamma_closed", "gamma_closed_reliable", "gamma_numeric",
                    "gamma_numeric_error", "gamma_numeric_status", "in_dead_band", "signs_agree",
                    "in_positivity_region", "reliable"});
        for (const auto* v : {&report.case_a, &report.case_b}) {
            const bool a = v->limit_case == LimitCase::ALower;
            t.add_row({to_string(v->limit_case), cell(v->surrogate_value), a ? "" : cell(v->surrogate_uncorrected),
                       cell(v->gamma_closed.value), cell(v->gamma_closed.reliable), cell(v->gamma_numeric.value),
                       cell(v->gamma_numeric.error), to_string(v->gamma_numeric.status), cell(v->in_dead_band),
                       cell(v->signs_agree), a ? cell(v->in_positivity_region) : "", cell(v->reliable)});
        }
        out.output = t.str();
        return out;
    }
    Json results{{"drift_equilibrium", config.params().drift_equilibrium()},
                 {"case_a", verdict_json(report.case_a)},
                 {"case_b", verdict_json(report.case_b)},
                 {"reliable", report.reliable}};
    Json diagnostics{{"dead_band", kSignDeadBand},
                     {"numeric_limit", "Richardson extrapolation over eps_k = 1e-2 (theta - eta) / 2^k, k < 5"},
                     {"surrogate_uncorrected", "part B ending in -Phi(g(theta)) instead of -Phi(g(eta)); known wrong, audit only"},
                     {"psi_denominator", denominator_name(opts.denominator)}};
    out.output = render(config, results, diagnostics);
    return out;
}

const std::vector<std::string>& sweep_header() {
    static const std::vector<std::string> h = {
        "parameter",  "value",         "status",        "rho_x0",  "psi_x0",  "ratio",
        "surrogate_a", "surrogate_b",  "gamma_a",       "gamma_b", "signs_agree_a", "signs_agree_b",
        "positivity_region_a", "reason"};
    return h;
}

CommandResult cmd_sweep(const RunConfig& config, const SweepSpec& spec, const CommandOptions& opts) {
    spec.validate();

    struct Row {
        double value = 0.0;
        bool ok = false;
        std::string reason;
        double rho = 0, psi = 0, ratio = 0, sa = 0, sb = 0, ga = 0, gb = 0;
        bool agree_a = false, agree_b = false, region_a = false;
    };

    const auto rows = parallel_map<Row>(spec.steps, opts.workers, [&](std::size_t k) {
        Row r;
        r.value = spec.point(k);
        try {
            const RunConfig c = with_param(config, spec.param, r.value);
            c.validate();
            const auto ctx = c.context(opts.denominator);
            r.rho = rho(ctx, c.x0);
            r.psi = psi(ctx, c.x0);
            r.ratio = expected_ratio(ctx, c.x0, policy_for(c));
            r.sa = surrogate_a(ctx);
            r.sb = surrogate_b(ctx);
            r.ga = gamma_closed_form(ctx, LimitCase::ALower).value;
            r.gb = gamma_closed_form(ctx, LimitCase::BUpper).value;
            r.agree_a = std::abs(r.sa) < kSignDeadBand || sign_of(r.sa) == sign_of(r.ga);
            r.agree_b = std::abs(r.sb) < kSignDeadBand || sign_of(r.sb) == sign_of(r.gb);
            r.region_a = c.eta >= c.params().drift_equilibrium();
            r.ok = true;
        } catch (const ConfigError& e) {
            r.reason = e.what();
        } catch (const InvalidArgument& e) {
            r.reason = e.what();
        } catch (const NonConvergence& e) {
            r.reason = std::string("non-convergence: ") + e.what();
        }
        return r;
    });

    std::size_t ok = 0;
    for (const auto& r : rows) ok += r.ok;
    if (ok == 0) {
        throw ConfigError(std::string("sweep: all ") + std::to_string(rows.size()) + " grid points skipped; first: " +
                          rows.front().reason);
    }

    const char* param = to_string(spec.param);
    CommandResult out;
    if (ok < rows.size()) out.log = std::to_string(rows.size() - ok) + " of " + std::to_string(rows.size()) +
                                    " grid points skipped\n";

    if (config.output_format == OutputFormat::Csv) {
        CsvTable t(sweep_header());
        for (const auto& r : rows) {
            if (r.ok) {
                t.add_row({param, cell(r.value), "ok", cell(r.rho), cell(r.psi), cell(r.ratio), cell(r.sa), cell(r.sb),
                           cell(r.ga), cell(r.gb), cell(r.agree_a), cell(r.agree_b), cell(r.region_a), ""});
            } else {
                t.add_row({param, cell(r.value), "skipped", "", "", "", "", "", "", "", "", "", "", r.reason});
            }
        }
        out.output = t.str();
        return out;
    }

    Json table = Json::array();
    for (const auto& r : rows) {
        Json j{{"value", r.value}, {"status", r.ok ? "ok" : "skipped"}};
        if (r.ok) {
            j["rho_x0"] = r.rho;
            j["psi_x0"] = r.psi;
            j["ratio"] = r.ratio;
            j["surrogate_a"] = r.sa;
            j["surrogate_b"] = r.sb;
            j["gamma_a"] = r.ga;
            j["gamma_b"] = r.gb;
            j["signs_agree_a"] = r.agree_a;
            j["signs_agree_b"] = r.agree_b;
            j["positivity_region_a"] = r.region_a;
        } else {
            j["reason"] = r.reason;
        }
        table.push_back(std::move(j));
    }
    Json results{{"parameter", param}, {"lo", spec.lo}, {"hi", spec.hi}, {"steps", spec.steps}, {"rows", table}};
    Json diagnostics{{"skipped", rows.size() - ok},
                     {"gamma", "closed form"},
                     {"dead_band", kSignDeadBand},
                     {"psi_denominator", denominator_name(opts.denominator)}};
    out.output = render(config, results, diagnostics);
    return out;
}

CommandResult cmd_validate(const RunConfig& config, const CommandOptions& opts) {
    ValidationInput in{config, opts.plan, opts.workers, opts.denominator};
    const auto props = run_all(in);

    bool all = true;
    Json list = Json::array();
    std::ostringstream log;
    for (const auto& p : props) {
        all = all && p.passed;
        list.push_back(to_json(p));
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.2f", p.seconds);
        log << (p.passed ? "PASS " : "FAIL ") << p.id << " " << p.name << ": measured " << format_real(p.measured)
            << " " << p.comparison << " " << format_real(p.tolerance) << " (" << secs << " s)\n";
    }

    CommandResult out;
    out.exit_code = all ? kExitOk : kExitValidation;
    out.log = log.str();

    if (config.output_format == OutputFormat::Csv) {
        CsvTable t({"id", "name", "passed", "measured", "comparison", "tolerance", "detail"});
        for (const auto& p : props) {
            t.add_row({p.id, p.name, cell(p.passed), cell(p.measured), p.comparison, cell(p.tolerance), p.detail});
        }
        out.output = t.str();
        return out;
    }
    const auto& plan = opts.plan;
    Json results{{"all_passed", all}, {"properties", list}};
    Json diagnostics{{"psi_denominator", denominator_name(opts.denominator)},
                     {"plan",
                      Json{{"moment_draws", plan.moment_draws},
                           {"passage_paths", plan.passage_paths},
                           {"passage_h", plan.passage_h},
                           {"renewal_replications", plan.renewal_replications},
                           {"renewal_horizon_cycles", plan.renewal_horizon_cycles},
                           {"grid_points", plan.grid_points},
                           {"determinism_horizon_cycles", plan.determinism_horizon_cycles}}}};
    out.output = render(config, results, diagnostics);
    return out;
}

}  // namespace ouharvest::app
