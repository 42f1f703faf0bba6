#pragma once

#include "ouharvest/differentiation.hpp"
#include "ouharvest/ou_model.hpp"
#include "ouharvest/quadrature.hpp"

namespace ouharvest {

// Denominator of the exit-time integrands. Density is the scale/speed-measure
// form; Cdf divides by Phi instead and exists only as a negative
// control for validation.
enum class ExitTimeDenominator { Density, Cdf };

// Closed-form hitting and exit-time functionals on the corridor (eta, theta).
// Immutable once built; safe to share between threads.
class FunctionalContext {
public:
    FunctionalContext(const OUParams& params, double eta, double theta,
                      QuadratureSpec quad = {},
                      ExitTimeDenominator denominator = ExitTimeDenominator::Density);

    const OUParams& params() const { return params_; }
    double eta() const { return eta_; }
    double theta() const { return theta_; }
    double width() const { return theta_ - eta_; }
    double alpha() const { return scale_.alpha; }
    double beta() const { return scale_.beta; }
    const QuadratureSpec& quadrature() const { return quad_; }
    ExitTimeDenominator denominator() const { return denominator_; }

    // alpha + beta u: the scale-function argument.
    double arg(double u) const { return scale_.alpha + scale_.beta * u; }
    double arg_eta() const { return arg_eta_; }
    double arg_theta() const { return arg_theta_; }

    // Phi(alpha + beta theta) - Phi(alpha + beta eta); may underflow for
    // corridors deep in a tail, where log_cdf_span() stays finite.
    double cdf_span() const { return cdf_span_; }
    double log_cdf_span() const { return log_cdf_span_; }

    void require_inside(double x, const char* where) const;

private:
    OUParams params_;
    double eta_;
    double theta_;
    QuadratureSpec quad_;
    ExitTimeDenominator denominator_;
    ScaleConstants scale_;
    double arg_eta_;
    double arg_theta_;
    double cdf_span_;
    double log_cdf_span_;
};

// P(reach eta before theta | X(0) = x).
double rho(const FunctionalContext& ctx, double x);
// 1 - rho(x), computed directly to avoid cancellation near eta.
double rho_complement(const FunctionalContext& ctx, double x);
double rho_prime(const FunctionalContext& ctx, double x);

// E[exit time from (eta, theta) | X(0) = x] by adaptive quadrature.
// Propagates NonConvergence from the integrator.
double psi(const FunctionalContext& ctx, double x);

// The two exit-time integrands (before the 2/beta and rho weights):
// lower: (Phi(g(u)) - Phi(g(eta))) / phi(g(u)),  upper: (Phi(g(theta)) - Phi(g(u))) / phi(g(u)).
double exit_integrand_lower(const FunctionalContext& ctx, double u);
double exit_integrand_upper(const FunctionalContext& ctx, double u);

// One-sided psi'(eta) (Lower) or psi'(theta) (Upper): second-order stencil
// starting at rel_step * (theta - eta), halved through four Richardson levels.
Extrapolation psi_prime_at_boundary(const FunctionalContext& ctx, Boundary which,
                                    double rel_step = 1e-3);

}  // namespace ouharvest
