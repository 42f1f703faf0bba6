#include "ouharvest/normal.hpp"

#include <cmath>
#include <limits>

namespace ouharvest {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// Beyond this |z| the direct erfc route loses Phi to underflow soon after,
// so tail logarithms switch to the continued fraction.
constexpr double kTailSwitch = 20.0;

}  // namespace

double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double mills_ratio(double t) {
    if (t < kTailSwitch) {
        return 0.5 * std::erfc(t * kInvSqrt2) / std_normal_pdf(t);
    }
    // R(t) = 1/(t + 1/(t + 2/(t + 3/(t + ...)))), evaluated bottom-up.
    double f = t;
    for (int k = 60; k >= 1; --k) {
        f = t + k / f;
    }
    return 1.0 / f;
}

double log_std_normal_cdf(double z) {
    if (z < -kTailSwitch) {
        return -0.5 * z * z - kLogSqrt2Pi + std::log(mills_ratio(-z));
    }
    if (z > 0.0) {
        return std::log1p(-std_normal_cdf(-z));
    }
    return std::log(std_normal_cdf(z));
}

double normal_cdf_diff(double lo, double hi) {
    if (lo >= 0.0) {
        return std_normal_cdf(-lo) - std_normal_cdf(-hi);
    }
    return std_normal_cdf(hi) - std_normal_cdf(lo);
}

double log_normal_cdf_diff(double lo, double hi) {
    if (lo == hi) {
        return -std::numeric_limits<double>::infinity();
    }
    if (hi <= 0.0) {
        const double lhi = log_std_normal_cdf(hi);
        return lhi + std::log1p(-std::exp(log_std_normal_cdf(lo) - lhi));
    }
    if (lo >= 0.0) {
        const double llo = log_std_normal_cdf(-lo);
        return llo + std::log1p(-std::exp(log_std_normal_cdf(-hi) - llo));
    }
    return std::log(normal_cdf_diff(lo, hi));
}

}  // namespace ouharvest
