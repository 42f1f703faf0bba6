#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace ouharvest {

// Calls fn(i) for every i in [0, n). Worker w handles i = w, w + W, ... in
// increasing order, so per-index work never depends on the worker count.
// If any call throws, the exception from the smallest failing index is
// rethrown after all workers have joined.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::exception_ptr> errors(used);
    std::vector<std::size_t> failed_at(used, std::numeric_limits<std::size_t>::max());
    {
        std::vector<std::jthread> threads;
        threads.reserve(used);
        for (unsigned w = 0; w < used; ++w) {
            threads.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += used) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                        failed_at[w] = i;
                        return;
                    }
                }
            });
        }
    }
    const auto first = std::min_element(failed_at.begin(), failed_at.end());
    if (*first != std::numeric_limits<std::size_t>::max()) {
        std::rethrow_exception(errors[static_cast<std::size_t>(first - failed_at.begin())]);
    }
}

// Deterministic parallel map: out[i] = fn(i).
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, unsigned workers, Fn&& fn) {
    std::vector<R> out(n);
    parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace ouharvest
