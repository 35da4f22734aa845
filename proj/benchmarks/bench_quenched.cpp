#include <benchmark/benchmark.h>

#include "pinning/annealed.hpp"
#include "pinning/model.hpp"
#include "pinning/quenched.hpp"
#include "pinning/rng.hpp"

namespace {

void BM_QuenchedPartition(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto spec = pinning::build_model(1.5, 1, {2.0, 1.0}, N);
  pinning::RngStream rng(1, 0);
  const auto omega = pinning::disorder_sample(spec, N, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pinning::quenched_partition(spec, 0.8, -0.4, omega, N).log_values.back());
  }
  state.SetComplexityN(N);
}
BENCHMARK(BM_QuenchedPartition)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_RestrictedPartitions(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto spec = pinning::build_model(1.5, 2, {2.0, 1.0, -1.0}, N);
  pinning::RngStream rng(2, 0);
  const auto omega = pinning::disorder_sample(spec, N, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pinning::restricted_partitions(spec, 0.8, -0.4, omega, N).tilde.log_values.back());
  }
}
BENCHMARK(BM_RestrictedPartitions)->Arg(256)->Arg(1024);

void BM_AnnealedWordDp(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto spec = pinning::build_model(1.2, 2, {2.0, 1.0, -1.0}, N);
  const auto ss = pinning::build_state_space(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pinning::annealed_log_partition(spec, ss, 0.8, -0.5, N).back());
  }
}
BENCHMARK(BM_AnnealedWordDp)->Arg(256)->Arg(1024);

}  // namespace
