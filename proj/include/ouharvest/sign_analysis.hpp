#pragma once

#include <functional>
#include <vector>

#include "ouharvest/functionals.hpp"
#include "ouharvest/renewal.hpp"

namespace ouharvest {

// Which boundary the regeneration level x is sent to.
enum class LimitCase {
    ALower,  // x -> eta
    BUpper,  // x -> theta
};

const char* to_string(LimitCase c);

// Surrogates are compared with gamma only when |surrogate| exceeds this.
inline constexpr double kSignDeadBand = 1e-9;

// Value at `eval` of the tangent line to u -> Phi(alpha + beta u) at `at`.
double tangent_line_value(const FunctionalContext& ctx, double at, double eval);

// Phi(g(eta)) + beta phi(g(eta)) (theta - eta) - Phi(g(theta)).
double surrogate_a(const FunctionalContext& ctx);
// Context-free form; accepts theta == eta (where it vanishes).
double surrogate_a(const ScaleConstants& scale, double eta, double theta);

// Phi(g(theta)) + beta phi(g(theta)) (eta - theta) - Phi(g(eta)): the tangent at
// theta evaluated at eta, minus the curve there.
double surrogate_b(const FunctionalContext& ctx);
double surrogate_b(const ScaleConstants& scale, double eta, double theta);

// Part B with the trailing term -Phi(g(theta)) in place of -Phi(g(eta)); it
// collapses to beta phi(g(theta)) (eta - theta). Known wrong, kept for audit.
double surrogate_b_uncorrected(const FunctionalContext& ctx);

struct ClosedFormGamma {
    double value = 0.0;
    double numerator = 0.0;    // -1 - (theta-eta) rho'(eta)   or   1 + (theta-eta) rho'(theta)
    double psi_prime = 0.0;    // psi'(eta) or psi'(theta)
    double psi_prime_error = 0.0;
    bool reliable = false;
};

// Boundary limit of E[Q]/E[T] under Q(y) = y - x via l'Hopital:
// case A (-1 - (theta-eta) rho'(eta)) / psi'(eta), case B (1 + (theta-eta) rho'(theta)) / -psi'(theta).
ClosedFormGamma gamma_closed_form(const FunctionalContext& ctx, LimitCase c);

enum class LimitStatus { Converged, NonConvergent, Divergent };

const char* to_string(LimitStatus s);

struct NumericLimit {
    double value = 0.0;
    double error = 0.0;
    LimitStatus status = LimitStatus::NonConvergent;
    std::vector<double> offsets;    // eps_k
    std::vector<double> ratios;     // E[Q]/E[T] at the boundary -/+ eps_k
    std::vector<double> residuals;  // Richardson level changes
};

// Harvest policy as a function of the regeneration level x.
using PolicyFamily = std::function<HarvestPolicy(double x)>;

// Evaluates expected_ratio at x = boundary +/- eps_k with
// eps_k = first_rel * (theta - eta) / 2^k, k < levels, and extrapolates eps -> 0.
NumericLimit boundary_limit(const FunctionalContext& ctx, LimitCase c, const PolicyFamily& policy,
                            int levels = 5, double first_rel = 1e-2);

// boundary_limit with Q(y) = y - x.
NumericLimit gamma_numeric_limit(const FunctionalContext& ctx, LimitCase c);

int sign_of(double v);

struct SignVerdict {
    LimitCase limit_case = LimitCase::ALower;
    double surrogate_value = 0.0;
    double surrogate_uncorrected = 0.0;  // case B only; equals surrogate_value for case A
    ClosedFormGamma gamma_closed;
    NumericLimit gamma_numeric;
    bool in_dead_band = false;
    bool signs_agree = false;           // true inside the dead band (no claim there)
    bool in_positivity_region = false;  // case A: eta >= -alpha/beta
    bool reliable = false;
};

struct SignReport {
    SignVerdict case_a;
    SignVerdict case_b;
    bool reliable = false;
};

SignVerdict sign_verdict(const FunctionalContext& ctx, LimitCase c);
SignReport sign_report(const FunctionalContext& ctx);

}  // namespace ouharvest
