#pragma once

#include <cstdint>

#include "ouharvest/ou_model.hpp"

namespace ouharvest {

// Stream ids are partitioned by purpose so that different experiments under
// one seed never reuse a counter range.
enum class StreamDomain : std::uint64_t {
    FirstPassage = 1,
    Renewal = 2,
    ExactMoments = 3,
    RecursionMoments = 4,
    Distribution = 5,
};

std::uint64_t stream_id(StreamDomain domain, std::uint64_t index);

struct FirstPassageBatch {
    std::uint64_t paths = 0;
    std::uint64_t lower = 0;
    double mean_time = 0.0;
    double time_variance = 0.0;  // unbiased sample variance

    std::uint64_t upper() const { return paths - lower; }
    double lower_fraction() const;
    double time_standard_error() const;
};

// `paths` independent first passages from corridor.x0; path i draws from
// stream_id(FirstPassage, i). Output does not depend on `workers`.
FirstPassageBatch run_first_passage_batch(const Corridor& corridor, double h,
                                          const OUParams& params, std::uint64_t seed,
                                          std::uint64_t paths, unsigned workers,
                                          const FirstPassageOptions& options = {});

}  // namespace ouharvest
