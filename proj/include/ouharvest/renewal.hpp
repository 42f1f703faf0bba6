#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ouharvest/errors.hpp"
#include "ouharvest/functionals.hpp"
#include "ouharvest/ou_model.hpp"

namespace ouharvest {

// Reward collected at a regeneration epoch, by boundary hit.
struct HarvestPolicy {
    double q_eta = 0.0;
    double q_theta = 0.0;

    // Q(y) = y - x: restock eta - x at the lower boundary, harvest theta - x at the upper.
    static HarvestPolicy displacement(double eta, double x, double theta) {
        return {eta - x, theta - x};
    }

    double reward(Boundary b) const { return b == Boundary::Lower ? q_eta : q_theta; }
};

struct CycleRecord {
    Boundary boundary;
    double duration;
    double reward;
};

// One trajectory of the regenerated process up to `horizon`. N(t) counts
// completed cycles only; the final incomplete cycle adds elapsed time but no
// reward and no record.
struct RenewalRunStats {
    double horizon = 0.0;
    std::uint64_t n_cycles = 0;
    double total_reward = 0.0;
    std::vector<CycleRecord> cycles;
    double time_average = 0.0;  // total_reward / horizon

    std::uint64_t lower_cycles() const;
    double completed_time() const;
};

// Thrown when a cycle exceeds the step cap; carries the cycles completed so
// far, with `horizon` set to their total duration.
class RenewalAborted : public StepCapExceeded {
public:
    RenewalAborted(const std::string& what, RenewalRunStats partial)
        : StepCapExceeded(what), partial_(std::move(partial)) {}
    const RenewalRunStats& partial() const { return partial_; }

private:
    RenewalRunStats partial_;
};

// E[Q] = q_theta + (q_eta - q_theta) rho(x).
double expected_reward(const FunctionalContext& ctx, double x, const HarvestPolicy& policy);

// E[Q] / E[T] = (q_theta + (q_eta - q_theta) rho(x)) / psi(x), for eta < x < theta.
double expected_ratio(const FunctionalContext& ctx, double x, const HarvestPolicy& policy);

RenewalRunStats simulate_renewal(const Corridor& corridor, const HarvestPolicy& policy,
                                 double horizon, double h, const OUParams& params,
                                 RngStream& stream, const FirstPassageOptions& options = {});

struct RenewalCheck {
    double time_average = 0.0;    // pooled R(t)/t
    double analytic_ratio = 0.0;  // E[Q]/E[T]
    double difference = 0.0;      // time_average - analytic_ratio
    double standard_error = 0.0;  // delta-method ratio-estimator SE
    std::uint64_t n_cycles = 0;
    double horizon = 0.0;

    // |difference| / standard_error (infinite when the SE is 0 and difference is not).
    double z_score() const;
};

inline constexpr std::uint64_t kMinCyclesForCheck = 100;

// Compares long-run R(t)/t with the closed-form ratio. Pools cycles across
// runs. Throws InsufficientData below kMinCyclesForCheck cycles.
RenewalCheck renewal_theorem_check(std::span<const RenewalRunStats> runs, double analytic_ratio);
RenewalCheck renewal_theorem_check(const RenewalRunStats& run, double analytic_ratio);

double lag1_autocorrelation(std::span<const double> values);

}  // namespace ouharvest
