#include <benchmark/benchmark.h>

#include "spheremaps/analysis.hpp"

using namespace spheremaps;

namespace {

const Partition kEvens = Partition::evens();

void BM_PcpL1NormHugeDim(benchmark::State& state) {
  // Few segments, 1e8 coordinates: the representation the big runs live on.
  const std::int64_t m[] = {19, 6859, 2476099};
  const PcpVector z = staircase_z(m, 100'000'000);
  const auto oracle = l1_oracle();
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle->norm(z));
  }
}
BENCHMARK(BM_PcpL1NormHugeDim);

void BM_EncodeDense(benchmark::State& state) {
  const std::int64_t k = state.range(0);
  std::vector<double> coords(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < k; ++i) {
    coords[static_cast<std::size_t>(i)] = static_cast<double>((i / 1000) % 7);
  }
  const DenseVector v{coords};
  for (auto _ : state) {
    benchmark::DoNotOptimize(PcpVector::encode(v));
  }
}
BENCHMARK(BM_EncodeDense)->Arg(1 << 14)->Arg(1 << 20);

void BM_IntegralMapPcp(benchmark::State& state) {
  const std::int64_t m[] = {19, 6859, 2476099};
  const PcpVector z = staircase_z(m, 2'476'100);
  const auto F = integral_homeo(2'476'100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(F->eval(z));
  }
}
BENCHMARK(BM_IntegralMapPcp);

void BM_IntegralMapDense(benchmark::State& state) {
  const std::int64_t k = state.range(0);
  std::vector<double> coords(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < k; ++i) {
    coords[static_cast<std::size_t>(i)] = 1.0 / static_cast<double>(1 + (i % 97));
  }
  coords[0] = 1.0;
  const DenseVector x{coords};
  const auto F = integral_homeo(k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(F->eval(x));
  }
}
BENCHMARK(BM_IntegralMapDense)->Arg(1 << 10)->Arg(1 << 16);

void BM_GreedyPartition(benchmark::State& state) {
  const auto oracle = lr_oracle(1.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_partition(oracle, state.range(0)));
  }
}
BENCHMARK(BM_GreedyPartition)->Arg(10'000)->Arg(100'000);

void BM_Theorem11_d3(benchmark::State& state) {
  const MapFactory factory = map_factory("normalize", l1_oracle());
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_theorem_1_1(factory, l1_oracle(), 3));
  }
}
BENCHMARK(BM_Theorem11_d3);

void BM_SeparationCheck(benchmark::State& state) {
  const GrowthSet growth = build_growth_set(l1_oracle(), kEvens, 2, 0.5, 4);
  const InterlacedPair pair = enumerate_interlaced(growth, 2, growth.elements.back() + 1).front();
  const auto F = normalize_map(pair.k, l1_oracle());
  const Profile u = staircase_profile(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_separation(*F, pair, u, kEvens, 0.5));
  }
}
BENCHMARK(BM_SeparationCheck);

}  // namespace

BENCHMARK_MAIN();
