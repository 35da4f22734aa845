#include <benchmark/benchmark.h>

#include "pinning/model.hpp"
#include "pinning/spectral.hpp"

namespace {

pinning::ModelSpec make_model(int q) {
  std::vector<double> a(q + 1);
  for (int i = 0; i <= q; ++i) a[i] = 1.0 / (1.0 + i);
  return pinning::build_model(1.2, q, a, 2048);
}

void BM_PerronFrobenius(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto spec = make_model(q);
  const auto ss = pinning::build_state_space(spec);
  const auto op = pinning::build_annealed_operator(spec, ss, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pinning::perron_frobenius(op).eigenvalue);
  }
  state.SetLabel(std::to_string(ss.size) + " states");
}
BENCHMARK(BM_PerronFrobenius)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_BuildFractionalOperator(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto spec = make_model(q);
  const auto ss = pinning::build_state_space(spec);
  const auto sd = pinning::perron_frobenius(pinning::build_annealed_operator(spec, ss, 1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pinning::build_fractional_operator(spec, ss, 1.0, 0.9, sd.eigenvalue));
  }
}
BENCHMARK(BM_BuildFractionalOperator)->Arg(2)->Arg(4);

void BM_RelevanceDerivative(benchmark::State& state) {
  const auto spec = make_model(static_cast<int>(state.range(0)));
  const auto ss = pinning::build_state_space(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pinning::relevance_derivative(spec, ss, 1.0).direct);
  }
}
BENCHMARK(BM_RelevanceDerivative)->Arg(1)->Arg(3);

}  // namespace
