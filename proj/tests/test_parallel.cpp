#include <atomic>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spheremaps/parallel.hpp"

using namespace spheremaps;

TEST_CASE("parallel_for covers every index exactly once") {
  for (int workers : {1, 2, 7}) {
    std::vector<std::atomic<int>> hits(257);
    for (auto& h : hits) h.store(0);
    parallel_for(257, workers, [&](std::int64_t i) { hits[static_cast<std::size_t>(i)]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("indexed result buffers make reductions order-independent") {
  auto run = [](int workers) {
    std::vector<double> out(1000);
    parallel_for(1000, workers, [&](std::int64_t i) {
      out[static_cast<std::size_t>(i)] = static_cast<double>(i * i % 97);
    });
    return std::accumulate(out.begin(), out.end(), 0.0);
  };
  CHECK(run(1) == run(5));
}

TEST_CASE("worker exceptions propagate") {
  CHECK_THROWS_AS(parallel_for(64, 4,
                               [](std::int64_t i) {
                                 if (i == 13) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("empty and single-element ranges") {
  int calls = 0;
  parallel_for(0, 4, [&](std::int64_t) { ++calls; });
  CHECK(calls == 0);
  parallel_for(1, 4, [&](std::int64_t) { ++calls; });
  CHECK(calls == 1);
}
