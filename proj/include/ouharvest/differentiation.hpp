#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ouharvest {

// Result of a Richardson tableau. `residuals[k]` is |T(k,k) - T(k-1,k-1)|,
// the change contributed by level k; `error` is the last residual.
struct Extrapolation {
    double value = 0.0;
    double error = 0.0;
    bool reliable = false;
    std::vector<double> residuals;
};

// Extrapolates samples taken at steps h, h/ratio, h/ratio^2, ... assuming an
// error expansion in powers first_order, first_order + order_step, ...
// The result is flagged unreliable when the last level change grows relative
// to the one before it and exceeds noise_floor * max(1, |value|).
Extrapolation richardson(std::span<const double> samples, double ratio, int first_order,
                         int order_step, double noise_floor = 1e-10);

using ScalarFunction = std::function<double(double)>;

// f'(x) from central differences at h0, h0/2, ... with Richardson elimination
// of the even error terms.
Extrapolation central_diff(const ScalarFunction& f, double x, double h0, int levels = 4);

// f''(x) from second central differences, same scheme.
Extrapolation central_diff2(const ScalarFunction& f, double x, double h0, int levels = 4);

enum class Direction { Forward, Backward };

// One-sided f'(x) using only f on [x, x + 2h0] (Forward) or [x - 2h0, x]
// (Backward); second-order stencil, then Richardson on the h^2, h^3, ... terms.
Extrapolation one_sided_diff(const ScalarFunction& f, double x, double h0, Direction dir,
                             int levels = 4);

}  // namespace ouharvest
