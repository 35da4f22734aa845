#include <benchmark/benchmark.h>

#include "pinning/model.hpp"
#include "pinning/sampler.hpp"
#include "pinning/spectral.hpp"

namespace {

void BM_SamplePath(benchmark::State& state) {
  const auto spec = pinning::build_model(1.5, 2, {2.0, 1.0, -1.0}, 4096);
  const auto ss = pinning::build_state_space(spec);
  const auto sd = pinning::perron_frobenius(pinning::build_annealed_operator(spec, ss, 0.8));
  const pinning::PathSampler sampler(spec, ss, sd, 0.8);
  const int64_t horizon = state.range(0);
  uint64_t stream = 0;
  int64_t gaps = 0;
  for (auto _ : state) {
    pinning::RngStream rng(7, stream++);
    const auto path = sampler.sample(horizon, rng);
    gaps += static_cast<int64_t>(path.gaps.size());
    benchmark::DoNotOptimize(path.points.back());
  }
  state.SetItemsProcessed(gaps);
}
BENCHMARK(BM_SamplePath)->Arg(10000)->Arg(100000);

void BM_HeavyTailInversion(benchmark::State& state) {
  // small table forces the analytic-tail branch often
  const auto spec = pinning::build_model(0.6, 1, {2.0, 1.0}, 128);
  const auto ss = pinning::build_state_space(spec);
  const auto sd = pinning::perron_frobenius(pinning::build_annealed_operator(spec, ss, 0.5));
  const pinning::PathSampler sampler(spec, ss, sd, 0.5);
  pinning::RngStream rng(8, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.draw_star_gap(rng));
  }
}
BENCHMARK(BM_HeavyTailInversion);

}  // namespace
