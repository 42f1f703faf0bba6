#include "ouharvest/sign_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ouharvest/normal.hpp"

namespace ouharvest {

const char* to_string(LimitCase c) { return c == LimitCase::ALower ? "A" : "B"; }

const char* to_string(LimitStatus s) {
    switch (s) {
        case LimitStatus::Converged: return "converged";
        case LimitStatus::NonConvergent: return "non-convergent";
        case LimitStatus::Divergent: return "divergent";
    }
    return "unknown";
}

double tangent_line_value(const FunctionalContext& ctx, double at, double eval) {
    const double g = ctx.arg(at);
    return std_normal_cdf(g) + ctx.beta() * std_normal_pdf(g) * (eval - at);
}

double surrogate_a(const ScaleConstants& s, double eta, double theta) {
    const double lo = s.alpha + s.beta * eta;
    const double hi = s.alpha + s.beta * theta;
    return s.beta * std_normal_pdf(lo) * (theta - eta) - normal_cdf_diff(lo, hi);
}

double surrogate_b(const ScaleConstants& s, double eta, double theta) {
    const double lo = s.alpha + s.beta * eta;
    const double hi = s.alpha + s.beta * theta;
    return normal_cdf_diff(lo, hi) - s.beta * std_normal_pdf(hi) * (theta - eta);
}

double surrogate_a(const FunctionalContext& ctx) {
    return ctx.beta() * std_normal_pdf(ctx.arg_eta()) * ctx.width() - ctx.cdf_span();
}

double surrogate_b(const FunctionalContext& ctx) {
    return ctx.cdf_span() - ctx.beta() * std_normal_pdf(ctx.arg_theta()) * ctx.width();
}

double surrogate_b_uncorrected(const FunctionalContext& ctx) {
    return ctx.beta() * std_normal_pdf(ctx.arg_theta()) * (ctx.eta() - ctx.theta());
}

ClosedFormGamma gamma_closed_form(const FunctionalContext& ctx, LimitCase c) {
    ClosedFormGamma out;
    if (c == LimitCase::ALower) {
        const auto d = psi_prime_at_boundary(ctx, Boundary::Lower);
        out.numerator = -1.0 - ctx.width() * rho_prime(ctx, ctx.eta());
        out.psi_prime = d.value;
        out.psi_prime_error = d.error;
        out.reliable = d.reliable;
        out.value = out.numerator / d.value;
    } else {
        const auto d = psi_prime_at_boundary(ctx, Boundary::Upper);
        out.numerator = 1.0 + ctx.width() * rho_prime(ctx, ctx.theta());
        out.psi_prime = d.value;
        out.psi_prime_error = d.error;
        out.reliable = d.reliable;
        out.value = out.numerator / -d.value;
    }
    return out;
}

NumericLimit boundary_limit(const FunctionalContext& ctx, LimitCase c, const PolicyFamily& policy,
                            int levels, double first_rel) {
    if (levels < 3) throw InvalidArgument("boundary_limit: need at least 3 levels");
    if (!(first_rel > 0.0 && first_rel < 0.5)) {
        throw InvalidArgument("boundary_limit: first_rel must be in (0, 0.5)");
    }
    NumericLimit out;
    double eps = first_rel * ctx.width();
    for (int k = 0; k < levels; ++k, eps *= 0.5) {
        const double x = c == LimitCase::ALower ? ctx.eta() + eps : ctx.theta() - eps;
        const HarvestPolicy q = policy(x);
        // Expand E[Q] around the probability that is small near this boundary.
        const double reward =
            c == LimitCase::ALower
                ? q.q_eta + (q.q_theta - q.q_eta) * rho_complement(ctx, x)
                : q.q_theta + (q.q_eta - q.q_theta) * rho(ctx, x);
        out.offsets.push_back(eps);
        out.ratios.push_back(reward / psi(ctx, x));
    }

    // A finite limit cannot keep growing geometrically as eps halves.
    const auto n = out.ratios.size();
    bool growing = true;
    for (std::size_t k = n - 2; k < n; ++k) {
        growing = growing && std::abs(out.ratios[k]) > 1.5 * std::abs(out.ratios[k - 1]);
    }

    const auto ex = richardson(out.ratios, 2.0, 1, 1);
    out.value = ex.value;
    out.error = ex.error;
    out.residuals = ex.residuals;

    double scale = 0.0;
    for (double r : out.ratios) scale = std::max(scale, std::abs(r));
    if (growing) {
        out.status = LimitStatus::Divergent;
    } else if (ex.reliable && std::isfinite(ex.value) && ex.error <= 1e-7 * scale) {
        out.status = LimitStatus::Converged;
    } else {
        out.status = LimitStatus::NonConvergent;
    }
    return out;
}

NumericLimit gamma_numeric_limit(const FunctionalContext& ctx, LimitCase c) {
    const double eta = ctx.eta();
    const double theta = ctx.theta();
    return boundary_limit(ctx, c, [eta, theta](double x) {
        return HarvestPolicy::displacement(eta, x, theta);
    });
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

SignVerdict sign_verdict(const FunctionalContext& ctx, LimitCase c) {
    SignVerdict v;
    v.limit_case = c;
    if (c == LimitCase::ALower) {
        v.surrogate_value = surrogate_a(ctx);
        v.surrogate_uncorrected = v.surrogate_value;
        v.in_positivity_region = ctx.eta() >= -ctx.alpha() / ctx.beta();
    } else {
        v.surrogate_value = surrogate_b(ctx);
        v.surrogate_uncorrected = surrogate_b_uncorrected(ctx);
    }
    v.gamma_closed = gamma_closed_form(ctx, c);
    v.gamma_numeric = gamma_numeric_limit(ctx, c);
    v.in_dead_band = std::abs(v.surrogate_value) < kSignDeadBand;
    v.signs_agree = v.in_dead_band || sign_of(v.surrogate_value) == sign_of(v.gamma_closed.value);
    v.reliable = v.gamma_closed.reliable && v.gamma_numeric.status == LimitStatus::Converged;
    return v;
}

SignReport sign_report(const FunctionalContext& ctx) {
    SignReport r;
    r.case_a = sign_verdict(ctx, LimitCase::ALower);
    r.case_b = sign_verdict(ctx, LimitCase::BUpper);
    r.reliable = r.case_a.reliable && r.case_b.reliable;
    return r;
}

}  // namespace ouharvest
