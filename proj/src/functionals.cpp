#include "ouharvest/functionals.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ouharvest/errors.hpp"
#include "ouharvest/normal.hpp"

namespace ouharvest {

namespace {

// Past this |g| the integrand is assembled in log space.
constexpr double kLogSpaceSwitch = 20.0;

// Below this the cdf span is treated as lost to underflow.
constexpr double kSpanFloor = 1e-280;

// (Phi(hi) - Phi(lo)) / phi(g).
double cdf_diff_over_pdf(double lo, double hi, double g) {
    if (std::abs(g) <= kLogSpaceSwitch) return normal_cdf_diff(lo, hi) / std_normal_pdf(g);
    return std::exp(log_normal_cdf_diff(lo, hi) + 0.5 * g * g + kLogSqrt2Pi);
}

double cdf_diff_over(const FunctionalContext& ctx, double lo, double hi, double g) {
    if (ctx.denominator() == ExitTimeDenominator::Cdf) {
        return normal_cdf_diff(lo, hi) / std_normal_cdf(g);
    }
    return cdf_diff_over_pdf(lo, hi, g);
}

}  // namespace

FunctionalContext::FunctionalContext(const OUParams& params, double eta, double theta,
                                     QuadratureSpec quad, ExitTimeDenominator denominator)
    : params_(params),
      eta_(eta),
      theta_(theta),
      quad_(quad),
      denominator_(denominator),
      scale_(alpha_beta(params)) {
    if (!std::isfinite(eta) || !std::isfinite(theta) || !(eta < theta)) {
        std::ostringstream os;
        os.precision(17);
        os << "eta=" << eta << " must be < theta=" << theta;
        throw InvalidArgument(os.str());
    }
    quad_.validate();
    arg_eta_ = arg(eta);
    arg_theta_ = arg(theta);
    cdf_span_ = normal_cdf_diff(arg_eta_, arg_theta_);
    log_cdf_span_ = log_normal_cdf_diff(arg_eta_, arg_theta_);
    if (!std::isfinite(log_cdf_span_)) {
        throw InvalidArgument("corridor span vanishes: Phi(g(theta)) - Phi(g(eta)) is not positive");
    }
}

void FunctionalContext::require_inside(double x, const char* where) const {
    if (!(x >= eta_ && x <= theta_)) {
        std::ostringstream os;
        os.precision(17);
        os << where << ": x=" << x << " outside [eta=" << eta_ << ", theta=" << theta_ << "]";
        throw InvalidArgument(os.str());
    }
}

double rho(const FunctionalContext& ctx, double x) {
    ctx.require_inside(x, "rho");
    if (x == ctx.eta()) return 1.0;
    if (x == ctx.theta()) return 0.0;
    if (ctx.cdf_span() < kSpanFloor) {
        return std::exp(log_normal_cdf_diff(ctx.arg(x), ctx.arg_theta()) - ctx.log_cdf_span());
    }
    return normal_cdf_diff(ctx.arg(x), ctx.arg_theta()) / ctx.cdf_span();
}

double rho_complement(const FunctionalContext& ctx, double x) {
    ctx.require_inside(x, "rho_complement");
    if (x == ctx.eta()) return 0.0;
    if (x == ctx.theta()) return 1.0;
    if (ctx.cdf_span() < kSpanFloor) {
        return std::exp(log_normal_cdf_diff(ctx.arg_eta(), ctx.arg(x)) - ctx.log_cdf_span());
    }
    return normal_cdf_diff(ctx.arg_eta(), ctx.arg(x)) / ctx.cdf_span();
}

double rho_prime(const FunctionalContext& ctx, double x) {
    ctx.require_inside(x, "rho_prime");
    const double g = ctx.arg(x);
    if (ctx.cdf_span() < kSpanFloor) {
        return -ctx.beta() * std::exp(-0.5 * g * g - kLogSqrt2Pi - ctx.log_cdf_span());
    }
    return -ctx.beta() * std_normal_pdf(g) / ctx.cdf_span();
}

double exit_integrand_lower(const FunctionalContext& ctx, double u) {
    const double g = ctx.arg(u);
    return cdf_diff_over(ctx, ctx.arg_eta(), g, g);
}

double exit_integrand_upper(const FunctionalContext& ctx, double u) {
    const double g = ctx.arg(u);
    return cdf_diff_over(ctx, g, ctx.arg_theta(), g);
}

double psi(const FunctionalContext& ctx, double x) {
    ctx.require_inside(x, "psi");
    if (x == ctx.eta() || x == ctx.theta()) return 0.0;
    const double below = integrate([&](double u) { return exit_integrand_lower(ctx, u); },
                                   ctx.eta(), x, ctx.quadrature());
    const double above = integrate([&](double u) { return exit_integrand_upper(ctx, u); }, x,
                                   ctx.theta(), ctx.quadrature());
    return 2.0 / ctx.beta() * (rho(ctx, x) * below + rho_complement(ctx, x) * above);
}

Extrapolation psi_prime_at_boundary(const FunctionalContext& ctx, Boundary which,
                                    double rel_step) {
    if (!(rel_step > 0.0 && rel_step <= 0.25)) {
        throw InvalidArgument("psi_prime_at_boundary: rel_step must be in (0, 0.25]");
    }
    const double h0 = rel_step * ctx.width();
    const auto f = [&](double x) { return psi(ctx, x); };
    if (which == Boundary::Lower) return one_sided_diff(f, ctx.eta(), h0, Direction::Forward);
    return one_sided_diff(f, ctx.theta(), h0, Direction::Backward);
}

}  // namespace ouharvest
