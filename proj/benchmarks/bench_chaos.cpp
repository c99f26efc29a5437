// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include <brownflow/chaos.hpp>

namespace bf = brownflow;

namespace {

double bump(double x) { return std::exp(-0.5 * x * x); }

void BM_HeatApply(benchmark::State& state) {
  const bf::FunctionGrid f =
      bf::FunctionGrid::sample(bump, -8, 8, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bf::heat_apply(f, 0.5));
}
BENCHMARK(BM_HeatApply)->Arg(1025)->Arg(4097);

void BM_ChaosStack(benchmark::State& state) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 1e-2).grid;
  const bf::FunctionGrid f = bf::default_chaos_grid(bump, 1.0);
  std::vector<double> wp(g.n_steps);
  bf::IncrementStream(1, bf::StreamLabel::plus(), g.dt).fill(wp);
  bf::ChaosSettings s;
  s.n_max = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bf::build_chaos_stack(f, g, bf::ChaosNoise{wp, {}}, s));
  }
}
BENCHMARK(BM_ChaosStack)->Arg(1)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
