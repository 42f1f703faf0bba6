#include "ouharvest/monte_carlo.hpp"

#include <cmath>

#include "ouharvest/errors.hpp"
#include "ouharvest/parallel.hpp"

namespace ouharvest {

std::uint64_t stream_id(StreamDomain domain, std::uint64_t index) {
    return (static_cast<std::uint64_t>(domain) << 48) | (index & ((std::uint64_t{1} << 48) - 1));
}

double FirstPassageBatch::lower_fraction() const {
    return paths == 0 ? 0.0 : static_cast<double>(lower) / static_cast<double>(paths);
}

double FirstPassageBatch::time_standard_error() const {
    return paths == 0 ? 0.0 : std::sqrt(time_variance / static_cast<double>(paths));
}

FirstPassageBatch run_first_passage_batch(const Corridor& corridor, double h,
                                          const OUParams& params, std::uint64_t seed,
                                          std::uint64_t paths, unsigned workers,
                                          const FirstPassageOptions& options) {
    if (paths < 2) throw InvalidArgument("run_first_passage_batch: need at least 2 paths");
    const ExactTransition transition(params, h);
    const auto outcomes = parallel_map<FirstPassageOutcome>(paths, workers, [&](std::size_t i) {
        RngStream stream(seed, stream_id(StreamDomain::FirstPassage, i));
        return first_passage(corridor, transition, stream, options);
    });

    FirstPassageBatch batch;
    batch.paths = paths;
    double sum = 0.0;
    for (const auto& o : outcomes) {
        if (o.boundary == Boundary::Lower) ++batch.lower;
        sum += o.hit_time;
    }
    batch.mean_time = sum / static_cast<double>(paths);
    double sq = 0.0;
    for (const auto& o : outcomes) {
        const double d = o.hit_time - batch.mean_time;
        sq += d * d;
    }
    batch.time_variance = sq / static_cast<double>(paths - 1);
    return batch;
}

}  // namespace ouharvest
