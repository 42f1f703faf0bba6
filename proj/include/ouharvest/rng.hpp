#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace ouharvest {

// Philox4x32-10 block function (counter-based; period 2^128 per key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Deterministic random stream identified by (seed, stream_id). Equal pairs
// replay equal sequences; distinct stream ids address disjoint counter
// ranges of the same keyed generator. Single owner: never share one stream
// between threads.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Uniform on the open interval (0, 1).
    double next_uniform();

    // Normal(mean, variance). variance == 0 returns mean without consuming
    // randomness; negative variance throws InvalidArgument.
    double next_gaussian(double mean, double variance);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Free-function spelling of RngStream::next_gaussian.
inline double next_gaussian(RngStream& stream, double mean, double variance) {
    return stream.next_gaussian(mean, variance);
}

}  // namespace ouharvest
