#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "ouharvest/monte_carlo.hpp"
#include "ouharvest/sign_analysis.hpp"
#include "report.hpp"

namespace ouharvest::app {

struct PropertyResult {
    std::string id;
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string comparison;  // how measured is held against tolerance, e.g. "<=" or ">="
    std::string detail;
    double seconds = 0.0;         // wall time; kept out of reports to keep them deterministic
    double budget_seconds = 0.0;  // 0 = no budget
    Json data = Json::object();
};

// Sample sizes. The defaults are the acceptance sizes.
struct ValidationPlan {
    std::uint64_t moment_draws = 1'000'000;
    std::uint64_t passage_paths = 100'000;
    double passage_h = 1e-4;
    std::uint64_t renewal_replications = 4;
    double renewal_horizon_cycles = 1e4;  // horizon = this * psi(x0)
    std::size_t grid_points = 20;         // per axis of the (eta, theta) grid
    double determinism_horizon_cycles = 200;

    // Small sizes for plumbing tests; tolerances are unchanged.
    static ValidationPlan quick();
};

struct ValidationInput {
    RunConfig config;
    ValidationPlan plan;
    unsigned workers = 1;
    ExitTimeDenominator denominator = ExitTimeDenominator::Density;
};

// First passages from one seed, shared by the rho/psi checks. The checks use
// the bridge-corrected batch; the uncorrected batches at h and 4h are kept for
// the bias report.
struct PassageSample {
    FirstPassageBatch corrected;
    FirstPassageBatch raw;
    FirstPassageBatch raw_coarse;
    double h = 0.0;
    double seconds = 0.0;
};

struct GridPoint {
    double a = 0.0, b = 0.0, eta = 0.0, theta = 0.0;
    double surrogate_a = 0.0, surrogate_b = 0.0;
    double gamma_a = 0.0, gamma_b = 0.0;
    double psi_prime_eta = 0.0, psi_prime_theta = 0.0;
    double numeric_a = 0.0, numeric_b = 0.0;
    LimitStatus status_a = LimitStatus::NonConvergent;
    LimitStatus status_b = LimitStatus::NonConvergent;
    std::string error;  // non-empty when evaluation threw
};

struct SignGrid {
    std::vector<GridPoint> points;
    double seconds = 0.0;
};

PropertyResult check_boundary_identities(const ValidationInput& in);
PropertyResult check_moment_matching(const ValidationInput& in);
PropertyResult check_infinitesimal_moments(const ValidationInput& in);

PassageSample run_passage_sample(const ValidationInput& in);
PropertyResult check_rho_agreement(const ValidationInput& in, const PassageSample& s);
PropertyResult check_psi_agreement(const ValidationInput& in, const PassageSample& s, ExitTimeDenominator d);
PropertyResult check_ode_residual(const ValidationInput& in, ExitTimeDenominator d);

// Two results: within three standard errors, and standard error below 1% of the ratio.
std::vector<PropertyResult> check_renewal_theorem(const ValidationInput& in);

SignGrid evaluate_sign_grid(const ValidationInput& in);
PropertyResult check_sign_agreement(const SignGrid& grid);
PropertyResult check_limit_agreement(const SignGrid& grid);
PropertyResult check_positivity_region(const SignGrid& grid);
PropertyResult check_boundary_derivatives(const SignGrid& grid);

PropertyResult check_determinism(const ValidationInput& in);
PropertyResult check_negative_control(const ValidationInput& in, const PassageSample& s);

std::vector<PropertyResult> run_all(const ValidationInput& in);

Json to_json(const PropertyResult& r);

}  // namespace ouharvest::app
