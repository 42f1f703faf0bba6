#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ouharvest/errors.hpp"

namespace ouharvest {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    int max_depth = 40;

    void validate() const {
        if (!(abs_tol > 0.0)) throw InvalidArgument("quadrature abs_tol must be > 0");
        if (!(rel_tol >= 0.0)) throw InvalidArgument("quadrature rel_tol must be >= 0");
        if (max_depth < 1) throw InvalidArgument("quadrature max_depth must be >= 1");
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// 15-point Kronrod abscissae on [-1, 1] (positive half, largest first) with the
// embedded 7-point Gauss rule on the odd-indexed nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    int depth;

    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(const F& f, double lo, double hi, int depth) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {lo, hi, kronrod, std::abs(kronrod - gauss), depth};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) integration: the segment with the
// largest error estimate is bisected until the summed estimate is within
// max(abs_tol, rel_tol * |I|). Throws NonConvergence when a segment at
// max_depth would need further splitting, or when f returns a non-finite value.
template <class F>
QuadratureResult integrate_detailed(const F& f, double lo, double hi,
                                    const QuadratureSpec& spec = {}) {
    spec.validate();
    if (!(lo <= hi)) throw InvalidArgument("integrate: lo must be <= hi");
    if (lo == hi) return {};

    std::vector<detail::Segment> segments;
    segments.push_back(detail::gauss_kronrod_15(f, lo, hi, 0));
    double total = segments.front().value;
    double error = segments.front().error;

    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

    while (!(error <= tolerance())) {
        if (!std::isfinite(total)) {
            throw NonConvergence("integrate: non-finite integrand on [" + std::to_string(lo) +
                                 ", " + std::to_string(hi) + "]");
        }
        std::pop_heap(segments.begin(), segments.end());
        const detail::Segment worst = segments.back();
        if (worst.depth >= spec.max_depth) {
            throw NonConvergence("integrate: max_depth " + std::to_string(spec.max_depth) +
                                 " exhausted with error estimate " + std::to_string(error));
        }
        const double mid = 0.5 * (worst.lo + worst.hi);
        segments.back() = detail::gauss_kronrod_15(f, worst.lo, mid, worst.depth + 1);
        std::push_heap(segments.begin(), segments.end());
        segments.push_back(detail::gauss_kronrod_15(f, mid, worst.hi, worst.depth + 1));
        std::push_heap(segments.begin(), segments.end());

        // Re-sum from scratch so roundoff does not accumulate in running totals.
        total = 0.0;
        error = 0.0;
        for (const auto& s : segments) {
            total += s.value;
            error += s.error;
        }
    }
    const int count = static_cast<int>(segments.size());
    return {total, error, count};
}

template <class F>
double integrate(const F& f, double lo, double hi, const QuadratureSpec& spec = {}) {
    return integrate_detailed(f, lo, hi, spec).value;
}

}  // namespace ouharvest
