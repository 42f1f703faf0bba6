#include "ouharvest/parallel.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>
#include <string>

#include "ouharvest/monte_carlo.hpp"

using namespace ouharvest;

TEST(ParallelFor, VisitsEveryIndexOnce) {
    for (unsigned workers : {1u, 2u, 3u, 8u}) {
        std::vector<std::atomic<int>> hits(101);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
}

TEST(ParallelFor, RethrowsSmallestFailingIndex) {
    for (unsigned workers : {1u, 2u, 4u}) {
        try {
            parallel_for(50, workers, [](std::size_t i) {
                if (i == 17 || i == 30 || i == 41) throw std::runtime_error(std::to_string(i));
            });
            FAIL() << "expected a throw";
        } catch (const std::runtime_error& e) {
            EXPECT_STREQ(e.what(), "17");
        }
    }
}

TEST(ParallelMap, ResultIndependentOfWorkers) {
    auto run = [](unsigned workers) {
        return parallel_map<double>(64, workers, [](std::size_t i) {
            RngStream s(42, i);
            return s.next_gaussian(0.0, 1.0);
        });
    };
    const auto one = run(1);
    EXPECT_EQ(one, run(2));
    EXPECT_EQ(one, run(8));
}

TEST(FirstPassageBatch, BitIdenticalAcrossWorkerCounts) {
    const OUParams params(-1.0, 0.5);
    const Corridor corridor(1.0, 1.5, 3.0);
    auto run = [&](unsigned workers) {
        return run_first_passage_batch(corridor, 1e-3, params, 42, 400, workers);
    };
    const auto a = run(1);
    for (unsigned w : {2u, 8u}) {
        const auto b = run(w);
        EXPECT_EQ(a.lower, b.lower);
        EXPECT_EQ(a.mean_time, b.mean_time);
        EXPECT_EQ(a.time_variance, b.time_variance);
    }
}

TEST(StreamId, DomainsDoNotOverlap) {
    EXPECT_NE(stream_id(StreamDomain::FirstPassage, 0), stream_id(StreamDomain::Renewal, 0));
    EXPECT_NE(stream_id(StreamDomain::FirstPassage, 5), stream_id(StreamDomain::FirstPassage, 6));
}
