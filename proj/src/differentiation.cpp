#include "ouharvest/differentiation.hpp"

#include <algorithm>
#include <cmath>

#include "ouharvest/errors.hpp"

namespace ouharvest {

Extrapolation richardson(std::span<const double> samples, double ratio, int first_order,
                         int order_step, double noise_floor) {
    if (samples.empty()) throw InvalidArgument("richardson: no samples");
    if (!(ratio > 1.0)) throw InvalidArgument("richardson: ratio must be > 1");

    const std::size_t n = samples.size();
    std::vector<std::vector<double>> table(n);
    for (std::size_t k = 0; k < n; ++k) {
        table[k].resize(k + 1);
        table[k][0] = samples[k];
        for (std::size_t j = 1; j <= k; ++j) {
            const double factor =
                std::pow(ratio, first_order + static_cast<int>(j - 1) * order_step) - 1.0;
            table[k][j] = table[k][j - 1] + (table[k][j - 1] - table[k - 1][j - 1]) / factor;
        }
    }

    Extrapolation out;
    out.value = table[n - 1][n - 1];
    for (std::size_t k = 1; k < n; ++k) {
        out.residuals.push_back(std::abs(table[k][k] - table[k - 1][k - 1]));
    }
    out.error = out.residuals.empty() ? 0.0 : out.residuals.back();

    bool finite = std::isfinite(out.value);
    for (double s : samples) finite = finite && std::isfinite(s);

    const double floor = noise_floor * std::max(1.0, std::abs(out.value));
    if (!finite) {
        out.reliable = false;
    } else if (out.residuals.size() < 2) {
        out.reliable = out.error <= floor;
    } else {
        const double last = out.residuals.back();
        const double prev = out.residuals[out.residuals.size() - 2];
        out.reliable = last <= prev || last <= floor;
    }
    return out;
}

namespace {

void check_step(double h0, int levels) {
    if (!(h0 > 0.0)) throw InvalidArgument("differentiation step h0 must be > 0");
    if (levels < 1) throw InvalidArgument("differentiation needs at least one level");
}

}  // namespace

Extrapolation central_diff(const ScalarFunction& f, double x, double h0, int levels) {
    check_step(h0, levels);
    std::vector<double> samples;
    double h = h0;
    for (int k = 0; k < levels; ++k, h *= 0.5) {
        samples.push_back((f(x + h) - f(x - h)) / (2.0 * h));
    }
    return richardson(samples, 2.0, 2, 2);
}

Extrapolation central_diff2(const ScalarFunction& f, double x, double h0, int levels) {
    check_step(h0, levels);
    const double center = f(x);
    std::vector<double> samples;
    double h = h0;
    for (int k = 0; k < levels; ++k, h *= 0.5) {
        samples.push_back((f(x + h) - 2.0 * center + f(x - h)) / (h * h));
    }
    return richardson(samples, 2.0, 2, 2);
}

Extrapolation one_sided_diff(const ScalarFunction& f, double x, double h0, Direction dir,
                             int levels) {
    check_step(h0, levels);
    const double sign = dir == Direction::Forward ? 1.0 : -1.0;
    const double origin = f(x);
    std::vector<double> samples;
    double h = h0;
    for (int k = 0; k < levels; ++k, h *= 0.5) {
        const double s = sign * h;
        samples.push_back((-3.0 * origin + 4.0 * f(x + s) - f(x + 2.0 * s)) / (2.0 * s));
    }
    return richardson(samples, 2.0, 2, 1);
}

}  // namespace ouharvest
