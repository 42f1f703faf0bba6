#include "ouharvest/renewal.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ouharvest {

std::uint64_t RenewalRunStats::lower_cycles() const {
    std::uint64_t n = 0;
    for (const auto& c : cycles) n += c.boundary == Boundary::Lower ? 1 : 0;
    return n;
}

double RenewalRunStats::completed_time() const {
    double t = 0.0;
    for (const auto& c : cycles) t += c.duration;
    return t;
}

double expected_reward(const FunctionalContext& ctx, double x, const HarvestPolicy& policy) {
    return policy.q_theta + (policy.q_eta - policy.q_theta) * rho(ctx, x);
}

double expected_ratio(const FunctionalContext& ctx, double x, const HarvestPolicy& policy) {
    if (!(x > ctx.eta() && x < ctx.theta())) {
        throw InvalidArgument("expected_ratio: x must lie strictly inside (eta, theta); "
                              "boundary limits belong to the sign analysis");
    }
    return expected_reward(ctx, x, policy) / psi(ctx, x);
}

RenewalRunStats simulate_renewal(const Corridor& corridor, const HarvestPolicy& policy,
                                 double horizon, double h, const OUParams& params,
                                 RngStream& stream, const FirstPassageOptions& options) {
    if (!(horizon > 0.0)) throw InvalidArgument("simulate_renewal: horizon must be > 0");
    const ExactTransition transition(params, h);

    RenewalRunStats stats;
    stats.horizon = horizon;
    double elapsed = 0.0;
    for (;;) {
        FirstPassageOutcome outcome;
        try {
            outcome = first_passage(corridor, transition, stream, options);
        } catch (const StepCapExceeded& e) {
            stats.horizon = elapsed;
            stats.time_average = elapsed > 0.0 ? stats.total_reward / elapsed : 0.0;
            throw RenewalAborted(std::string(e.what()) + " after " +
                                     std::to_string(stats.n_cycles) + " completed cycles",
                                 std::move(stats));
        }
        if (elapsed + outcome.hit_time > horizon) break;
        elapsed += outcome.hit_time;
        const double reward = policy.reward(outcome.boundary);
        stats.cycles.push_back({outcome.boundary, outcome.hit_time, reward});
        stats.total_reward += reward;
        ++stats.n_cycles;
    }
    stats.time_average = stats.total_reward / horizon;
    return stats;
}

double RenewalCheck::z_score() const {
    if (standard_error > 0.0) return std::abs(difference) / standard_error;
    return difference == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

RenewalCheck renewal_theorem_check(std::span<const RenewalRunStats> runs,
                                   double analytic_ratio) {
    RenewalCheck check;
    check.analytic_ratio = analytic_ratio;
    double reward = 0.0;
    double cycle_reward = 0.0;
    double cycle_time = 0.0;
    for (const auto& run : runs) {
        check.n_cycles += run.n_cycles;
        check.horizon += run.horizon;
        reward += run.total_reward;
        for (const auto& c : run.cycles) {
            cycle_reward += c.reward;
            cycle_time += c.duration;
        }
    }
    if (check.n_cycles < kMinCyclesForCheck) {
        throw InsufficientData("renewal_theorem_check: " + std::to_string(check.n_cycles) +
                               " cycles, need at least " + std::to_string(kMinCyclesForCheck));
    }
    check.time_average = reward / check.horizon;
    check.difference = check.time_average - analytic_ratio;

    const double n = static_cast<double>(check.n_cycles);
    const double ratio = cycle_reward / cycle_time;
    double sq = 0.0;
    for (const auto& run : runs) {
        for (const auto& c : run.cycles) {
            const double d = c.reward - ratio * c.duration;
            sq += d * d;
        }
    }
    const double mean_time = cycle_time / n;
    check.standard_error = std::sqrt(sq / (n * (n - 1.0))) / mean_time;
    return check;
}

RenewalCheck renewal_theorem_check(const RenewalRunStats& run, double analytic_ratio) {
    return renewal_theorem_check(std::span<const RenewalRunStats>(&run, 1), analytic_ratio);
}

double lag1_autocorrelation(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3) throw InsufficientData("lag1_autocorrelation: need at least 3 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values[i] - mean;
        den += d * d;
        if (i + 1 < n) num += d * (values[i + 1] - mean);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace ouharvest
