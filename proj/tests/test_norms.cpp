#include <cmath>
#include <vector>

#include "doctest.h"
#include "spheremaps/norms.hpp"
#include "spheremaps/witnesses.hpp"
#include "test_util.hpp"

using namespace spheremaps;
using test_util::Rng;

TEST_CASE("psi closed forms") {
  CHECK(psi(*l1_oracle(), 19) == 19.0);
  CHECK(psi(*l2_oracle(), 4) == 2.0);
  CHECK(psi(*lr_oracle(3.0), 1'000'000) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(psi(*linf_oracle(), 12345) == 1.0);
}

TEST_CASE("psi matches dense summation and is non-decreasing") {
  for (double r : {1.0, 1.5, 2.0, 3.0}) {
    const auto oracle = lr_oracle(r);
    // Running dense sum of |1|^r, checked at every k up to 1e4.
    double running = 0.0, prev = 0.0;
    int dense_spot = 0;
    for (std::int64_t k = 1; k <= 10'000; ++k) {
      running += 1.0;
      const double dense = std::pow(running, 1.0 / r);
      const double closed = oracle->psi(k);
      CHECK(closed == doctest::Approx(dense).epsilon(1e-12));
      CHECK(closed >= prev);
      prev = closed;
      // Spot-check the incremental sum against a real norm evaluation.
      if (k == 1 || k == 999 || k == 10'000) {
        const DenseVector ones(std::vector<double>(static_cast<std::size_t>(k), 1.0));
        CHECK(closed == doctest::Approx(oracle->norm(ones)).epsilon(1e-12));
        ++dense_spot;
      }
    }
    CHECK(dense_spot == 3);
  }
}

TEST_CASE("pcp norms agree with dense norms") {
  Rng rng(314);
  for (double r : {1.0, 1.5, 2.0, 3.0}) {
    const auto oracle = lr_oracle(r);
    for (int trial = 0; trial < 250; ++trial) {
      const std::int64_t dim = 1 + static_cast<std::int64_t>(rng.bounded(
                                       trial % 25 == 0 ? 10'000 : 400));
      const PcpVector v = test_util::random_pcp(rng, dim);
      CHECK(oracle->norm(v) == doctest::Approx(oracle->norm(v.materialize())).epsilon(1e-12));
    }
  }
}

TEST_CASE("psi_partition on the parity partition") {
  CHECK(psi_partition_evens(*l1_oracle(), 5) == 2.0);
  CHECK(psi_partition_evens(*l2_oracle(), 4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("psi_partition of the greedy partition obeys the halving bound") {
  const auto oracle = l1_oracle();
  const Partition partition = greedy_partition(oracle, 100);
  const double value = psi_partition(*oracle, partition, 100);
  CHECK(value >= (psi(*oracle, 100) - 1.0) / 2.0);
  CHECK(value == 50.0);  // greedy on l1 alternates, so both classes get 50 of 100
}

TEST_CASE("psi_partition via explicit support set") {
  SupportSet evens{6, {2, 4, 6}};
  CHECK(psi_partition(*l1_oracle(), evens, 6) == 3.0);
  CHECK(psi_partition(*l1_oracle(), evens, 5) == 2.0);
}

TEST_CASE("block estimates hold with equality for lr oracles") {
  SUBCASE("l2 basis blocks") {
    const DenseVector e1({1.0, 0.0}), e2({0.0, 1.0});
    const std::vector<DenseVector> blocks{e1, e2};
    const InequalityReport report = check_block_estimates(*l2_oracle(), blocks);
    CHECK(report.verdict == Verdict::Pass);
    const double root2 = std::sqrt(2.0);
    for (const auto& [name, value] : report.hypothesis_values) {
      CHECK(value == doctest::Approx(root2).epsilon(1e-12));
    }
  }

  SUBCASE("l1 additivity") {
    const std::vector<DenseVector> blocks{DenseVector({1.0, 1.0, 0.0, 0.0}),
                                          DenseVector({0.0, 0.0, 1.0, 0.0})};
    const InequalityReport report = check_block_estimates(*l1_oracle(), blocks);
    CHECK(report.verdict == Verdict::Pass);
    CHECK(report.conclusion_value == 3.0);
  }

  SUBCASE("l3 random blocks, brute force both sides") {
    Rng rng(2718);
    for (int trial = 0; trial < 50; ++trial) {
      const std::int64_t dim = 20 + static_cast<std::int64_t>(rng.bounded(180));
      // Random breakpoints, one block per range.
      std::vector<DenseVector> blocks;
      std::int64_t pos = 1;
      while (pos <= dim) {
        const std::int64_t len = 1 + static_cast<std::int64_t>(rng.bounded(9));
        const std::int64_t hi = std::min<std::int64_t>(pos + len - 1, dim);
        std::vector<double> coords(static_cast<std::size_t>(dim), 0.0);
        bool nonzero = false;
        for (std::int64_t i = pos; i <= hi; ++i) {
          coords[static_cast<std::size_t>(i - 1)] = rng.uniform(-1.0, 1.0);
          nonzero = nonzero || coords[static_cast<std::size_t>(i - 1)] != 0.0;
        }
        if (!nonzero) coords[static_cast<std::size_t>(pos - 1)] = 0.5;
        blocks.emplace_back(std::move(coords));
        pos = hi + 1;
      }
      const InequalityReport report = check_block_estimates(*lr_oracle(3.0), blocks);
      CHECK(report.verdict == Verdict::Pass);
      // p = q = r: both estimates meet the norm of the sum exactly.
      CHECK(report.margin == doctest::Approx(0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("block sequence validation") {
  const DenseVector a({1.0, 1.0, 0.0}), b({0.0, 1.0, 1.0});
  const std::vector<DenseVector> overlapping{a, b};
  CHECK_THROWS_AS(check_block_estimates(*l1_oracle(), overlapping), NotBlockSequence);

  const std::vector<DenseVector> out_of_order{DenseVector({0.0, 0.0, 1.0}),
                                              DenseVector({1.0, 0.0, 0.0})};
  CHECK_THROWS_AS(check_block_estimates(*l1_oracle(), out_of_order), NotBlockSequence);
}

TEST_CASE("1-unconditionality spot test: shrinking any coordinates never increases the norm") {
  Rng rng(777);
  for (double r : {1.0, 1.5, 2.0, 3.0}) {
    const auto oracle = lr_oracle(r);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::int64_t dim = 2 + static_cast<std::int64_t>(rng.bounded(40));
      const DenseVector v = test_util::random_dense(rng, dim);
      // Sign-flip or shrink a random subset of the coordinates.
      std::vector<double> shrunk(v.values().begin(), v.values().end());
      for (double& c : shrunk) {
        if (rng.next() % 2 == 0) c *= (rng.next() % 2 == 0 ? -1.0 : 1.0) * rng.uniform01();
      }
      CHECK(oracle->norm(DenseVector(shrunk)) <= oracle->norm(v) + 1e-12);
    }
  }
}

TEST_CASE("normalized basis vectors") {
  for (double r : {1.0, 1.7, 2.0, 4.0}) {
    const auto oracle = lr_oracle(r);
    CHECK(oracle->norm(DenseVector({0.0, 1.0, 0.0})) == 1.0);
  }
  CHECK(linf_oracle()->norm(DenseVector({0.0, -1.0})) == 1.0);
}

TEST_CASE("oracle names resolve") {
  CHECK(make_oracle("l1")->name() == "l1");
  CHECK(make_oracle("l2")->r_exponent() == 2.0);
  CHECK(make_oracle("lr:1.5")->r_exponent() == 1.5);
  CHECK(make_oracle("linf")->is_c0_like());
  CHECK_THROWS_AS(make_oracle("l3"), ManifestError);
  CHECK_THROWS_AS(make_oracle("lr:0.5"), ManifestError);
}

TEST_CASE("FundamentalFunction memoizes") {
  FundamentalFunction psi_fn(lr_oracle(1.5));
  CHECK(psi_fn(1) == 1.0);
  CHECK(psi_fn(64) == doctest::Approx(std::pow(64.0, 1.0 / 1.5)).epsilon(1e-12));
  CHECK(psi_fn(64) == psi_fn(64));
}
