#pragma once

// Standard normal density and distribution function, plus tail-safe
// differences and logarithms used by the corridor functionals.

namespace ouharvest {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

double std_normal_pdf(double z);
double std_normal_cdf(double z);

// log Phi(z); finite for any finite z (uses the Mills-ratio continued
// fraction once Phi underflows).
double log_std_normal_cdf(double z);

// Phi(hi) - Phi(lo) for lo <= hi, evaluated on whichever tail avoids
// cancellation.
double normal_cdf_diff(double lo, double hi);

// log(Phi(hi) - Phi(lo)); -inf when lo == hi.
double log_normal_cdf_diff(double lo, double hi);

// (1 - Phi(t)) / phi(t) for t >= 0.
double mills_ratio(double t);

}  // namespace ouharvest
