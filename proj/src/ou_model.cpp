#include "ouharvest/ou_model.hpp"

#include <cmath>
#include <string>

#include "ouharvest/errors.hpp"

namespace ouharvest {

namespace {

std::string show(double v) { return show_value(v); }

void require_positive_step(double h, const char* where) {
    if (!(h > 0.0)) throw InvalidArgument(std::string(where) + ": h must be > 0, got " + show(h));
}

}  // namespace

OUParams::OUParams(double a, double b, DriftRegime regime) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidArgument("OUParams: a and b must be finite");
    }
    if (!(b > 0.0)) {
        throw InvalidArgument("b=" + show(b) + " must be > 0 (beta = sqrt(2b) must be real)");
    }
    if (regime == DriftRegime::Consumption && !(a < 0.0)) {
        throw InvalidArgument("a=" + show(a) +
                              " must be < 0 (consumption regime); waive explicitly to allow a >= 0");
    }
}

ScaleConstants alpha_beta(const OUParams& params) {
    return {params.a() * std::sqrt(2.0) / std::sqrt(params.b()), std::sqrt(2.0 * params.b())};
}

Corridor::Corridor(double eta, double x0, double theta, CorridorKind kind)
    : eta_(eta), x0_(x0), theta_(theta) {
    if (!std::isfinite(eta) || !std::isfinite(x0) || !std::isfinite(theta)) {
        throw InvalidArgument("Corridor: boundaries must be finite");
    }
    if (!(eta < theta)) {
        throw InvalidArgument("eta=" + show(eta) + " must be < theta=" + show(theta));
    }
    if (kind == CorridorKind::Strict) {
        if (!(eta >= 0.0)) throw InvalidArgument("eta=" + show(eta) + " must be >= 0");
        if (!(eta < x0)) {
            throw InvalidArgument("eta=" + show(eta) + " must be < x0=" + show(x0));
        }
        if (!(x0 < theta)) {
            throw InvalidArgument("x0=" + show(x0) + " must be < theta=" + show(theta));
        }
    } else if (!(eta <= x0 && x0 <= theta)) {
        throw InvalidArgument("x0=" + show(x0) + " must lie in [eta=" + show(eta) +
                              ", theta=" + show(theta) + "]");
    }
}

const char* to_string(Boundary boundary) {
    return boundary == Boundary::Lower ? "lower" : "upper";
}

double mean_X(double t, double x, const OUParams& params) {
    if (!(t >= 0.0)) throw InvalidArgument("mean_X: t must be >= 0");
    const double b = params.b();
    return x * std::exp(b * t) + params.a() / b * std::expm1(b * t);
}

double cov_X(double s, double t, const OUParams& params) {
    if (!(s >= 0.0)) throw InvalidArgument("cov_X: s must be >= 0");
    if (!(s <= t)) {
        throw InvalidArgument("cov_X: s=" + show(s) + " must be <= t=" + show(t));
    }
    const double b = params.b();
    return std::exp(b * (s + t)) * -std::expm1(-2.0 * b * s) / (2.0 * b);
}

double mean_Y(std::int64_t n, double h, double x, const OUParams& params) {
    if (n < 0) throw InvalidArgument("mean_Y: n must be >= 0");
    require_positive_step(h, "mean_Y");
    const double bh = params.b() * h;
    const double nbh = static_cast<double>(n) * bh;
    // a h e^{bh} (1 - e^{nbh}) / (1 - e^{bh}), written with expm1.
    return x * std::exp(nbh) + params.a() * h * std::exp(bh) * std::expm1(nbh) / std::expm1(bh);
}

double cov_Y(std::int64_t m, std::int64_t n, double h, const OUParams& params) {
    if (m < 0) throw InvalidArgument("cov_Y: m must be >= 0");
    if (m > n) {
        throw InvalidArgument("cov_Y: m=" + std::to_string(m) + " must be <= n=" +
                              std::to_string(n));
    }
    require_positive_step(h, "cov_Y");
    const double bh = params.b() * h;
    const double lag = static_cast<double>(n - m);
    return h * std::exp((2.0 + lag) * bh) * std::expm1(2.0 * static_cast<double>(m) * bh) /
           std::expm1(2.0 * bh);
}

double step_recursion(double y, double h, const OUParams& params, RngStream& stream,
                      double noise_scale) {
    require_positive_step(h, "step_recursion");
    if (!(noise_scale >= 0.0)) throw InvalidArgument("step_recursion: noise_scale must be >= 0");
    const double w = stream.next_gaussian(params.a() * h, h * noise_scale);
    return std::exp(params.b() * h) * (y + w);
}

ExactTransition::ExactTransition(const OUParams& params, double h) : h_(h) {
    require_positive_step(h, "ExactTransition");
    const double b = params.b();
    growth_ = std::exp(b * h);
    shift_ = params.a() / b * std::expm1(b * h);
    variance_ = std::expm1(2.0 * b * h) / (2.0 * b);
    stddev_ = std::sqrt(variance_);
}

double step_exact(double y, double h, const OUParams& params, RngStream& stream) {
    return ExactTransition(params, h).sample(y, stream);
}

FirstPassageOutcome first_passage(const Corridor& corridor, double h, const OUParams& params,
                                  RngStream& stream, const FirstPassageOptions& options) {
    return first_passage(corridor, ExactTransition(params, h), stream, options);
}

FirstPassageOutcome first_passage(const Corridor& corridor, const ExactTransition& transition,
                                  RngStream& stream, const FirstPassageOptions& options) {
    if (!corridor.strict()) {
        throw InvalidArgument("first_passage: x0 must lie strictly inside (eta, theta)");
    }
    const double eta = corridor.eta();
    const double theta = corridor.theta();
    const double h = transition.h();
    // Bridge probabilities below exp(-40) are not worth a uniform draw.
    const double bridge_reach = 20.0 * h;

    double y = corridor.x0();
    for (std::uint64_t step = 1; step <= options.step_cap; ++step) {
        const double next = transition.sample(y, stream);
        if (next <= eta) return {Boundary::Lower, static_cast<double>(step) * h, step};
        if (next >= theta) return {Boundary::Upper, static_cast<double>(step) * h, step};
        if (options.bridge_correction) {
            const double lower_gap = (y - eta) * (next - eta);
            const double upper_gap = (theta - y) * (theta - next);
            if (lower_gap < bridge_reach || upper_gap < bridge_reach) {
                const double p_lower = std::exp(-2.0 * lower_gap / h);
                const double p_upper = std::exp(-2.0 * upper_gap / h);
                const double u = stream.next_uniform();
                if (u < p_lower) return {Boundary::Lower, static_cast<double>(step) * h, step};
                if (u < p_lower + p_upper) {
                    return {Boundary::Upper, static_cast<double>(step) * h, step};
                }
            }
        }
        y = next;
    }
    throw StepCapExceeded("first_passage: step cap " + std::to_string(options.step_cap) +
                          " exceeded before leaving (" + show(eta) + ", " + show(theta) + ")");
}

}  // namespace ouharvest
