#pragma once

#include <cstdint>

#include "ouharvest/rng.hpp"

namespace ouharvest {

// Whether OUParams accepts a >= 0. The consumption regime (a < 0) is the
// supported envelope; the closed forms remain valid for any real a.
enum class DriftRegime { Consumption, AnySign };

// Coefficients of dX = (a + b X) dt + dB with unit diffusion.
class OUParams {
public:
    OUParams(double a, double b, DriftRegime regime = DriftRegime::Consumption);

    double a() const { return a_; }
    double b() const { return b_; }

    // -a/b, where the drift vanishes.
    double drift_equilibrium() const { return -a_ / b_; }

private:
    double a_;
    double b_;
};

struct ScaleConstants {
    double alpha;  // a * sqrt(2) / sqrt(b)
    double beta;   // sqrt(2 b)
};

ScaleConstants alpha_beta(const OUParams& params);

enum class CorridorKind {
    Strict,    // 0 <= eta < x0 < theta
    Relaxed,   // eta <= x0 <= theta, eta < theta (boundary-limit analysis)
};

// Boundaries (eta, theta) and regeneration level x0.
class Corridor {
public:
    Corridor(double eta, double x0, double theta, CorridorKind kind = CorridorKind::Strict);

    double eta() const { return eta_; }
    double x0() const { return x0_; }
    double theta() const { return theta_; }
    double width() const { return theta_ - eta_; }
    bool strict() const { return eta_ < x0_ && x0_ < theta_; }

private:
    double eta_;
    double x0_;
    double theta_;
};

enum class Boundary { Lower, Upper };

const char* to_string(Boundary boundary);

struct FirstPassageOutcome {
    Boundary boundary = Boundary::Lower;
    double hit_time = 0.0;  // steps * h
    std::uint64_t steps = 0;
};

// Moments of the continuous process started at x.
double mean_X(double t, double x, const OUParams& params);
// Cov[X(s), X(t)] for 0 <= s <= t: e^{b(s+t)} (1 - e^{-2bs}) / (2b).
double cov_X(double s, double t, const OUParams& params);

// Moments of the recursion Y_nh = e^{bh} (Y_(n-1)h + W_nh), W ~ N(ah, h), Y_0 = x.
double mean_Y(std::int64_t n, double h, double x, const OUParams& params);
double cov_Y(std::int64_t m, std::int64_t n, double h, const OUParams& params);

// One step of the recursion. `noise_scale` multiplies the variance of W;
// 0 gives the deterministic skeleton e^{bh}(y + ah).
double step_recursion(double y, double h, const OUParams& params, RngStream& stream,
                      double noise_scale = 1.0);

// Exact Gaussian transition law of X(t + h) given X(t) = y.
class ExactTransition {
public:
    ExactTransition(const OUParams& params, double h);

    double mean(double y) const { return growth_ * y + shift_; }
    double variance() const { return variance_; }
    double sample(double y, RngStream& stream) const {
        return mean(y) + stddev_ * stream.next_gaussian(0.0, 1.0);
    }
    double h() const { return h_; }

private:
    double h_;
    double growth_;    // e^{bh}
    double shift_;     // (a/b)(e^{bh} - 1)
    double variance_;  // (e^{2bh} - 1)/(2b)
    double stddev_;
};

double step_exact(double y, double h, const OUParams& params, RngStream& stream);

struct FirstPassageOptions {
    // Registers a crossing inside a step with the Brownian-bridge probability
    // exp(-2 d0 d1 / h), where d0, d1 are the endpoint distances to a boundary.
    bool bridge_correction = false;
    std::uint64_t step_cap = 1'000'000'000;
};

// Runs exact transitions of size h from corridor.x0 until the path leaves
// (eta, theta). Throws StepCapExceeded after options.step_cap steps.
FirstPassageOutcome first_passage(const Corridor& corridor, double h, const OUParams& params,
                                  RngStream& stream, const FirstPassageOptions& options = {});

// Same as above with a precomputed transition (hot loop for batch runs).
FirstPassageOutcome first_passage(const Corridor& corridor, const ExactTransition& transition,
                                  RngStream& stream, const FirstPassageOptions& options = {});

}  // namespace ouharvest
