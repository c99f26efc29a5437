// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include <benchmark/benchmark.h>

#include <brownflow/flow_plus.hpp>
#include <brownflow/flow_pm.hpp>
#include <brownflow/pair_motion.hpp>
#include <brownflow/wedge.hpp>

namespace bf = brownflow;

namespace {

const std::vector<bf::StreamLabel> kPm{bf::StreamLabel::plus(), bf::StreamLabel::minus()};

void BM_SampleBundle(benchmark::State& state) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 1.0 / static_cast<double>(state.range(0))).grid;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bf::sample_bundle(g, kPm, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_SampleBundle)->Arg(1000)->Arg(100000);

void BM_NPointPm(benchmark::State& state) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 1e-3).grid;
  const bf::NoiseBundle b = bf::sample_bundle(g, kPm, 1);
  std::vector<double> x0;
  for (int i = 0; i < state.range(0); ++i) x0.push_back(-1.0 + 2.0 * i / state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bf::simulate_n_point_pm(x0, b));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_NPointPm)->Arg(2)->Arg(16)->Arg(128);

void BM_FlowMapPm(benchmark::State& state) {
  const bf::NoiseBundle b = bf::sample_bundle(bf::make_grid(0, 1, 1e-3).grid, kPm, 2);
  std::vector<double> x;
  for (int i = 0; i < state.range(0); ++i) x.push_back(-5.0 + 10.0 * i / state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bf::flow_map_pm(x, b));
}
BENCHMARK(BM_FlowMapPm)->Arg(1000)->Arg(10000);

void BM_NPointPlusKernel(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const bf::NoiseBundle b =
      bf::sample_bundle(bf::make_grid(0, 1, 1e-3).grid, bf::plus_labels(n), 3);
  std::vector<double> x0(n, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bf::simulate_n_point_plus(x0, b, bf::PlusMode::kernel));
  }
}
BENCHMARK(BM_NPointPlusKernel)->Arg(2)->Arg(16);

void BM_EstimateKernel(benchmark::State& state) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 1e-3).grid;
  std::vector<double> wp(g.n_steps);
  bf::IncrementStream(4, bf::StreamLabel::plus(), g.dt).fill(wp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bf::estimate_kernel_plus(0.5, g, wp, static_cast<std::size_t>(state.range(0)), 5));
  }
}
BENCHMARK(BM_EstimateKernel)->Arg(256);

void BM_PairMotion(benchmark::State& state) {
  bf::PairMotionOptions o;
  o.dt_min = 1e-5;
  o.crossing_eps = 0.01;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bf::run_pair_motion(-0.1, 0.1, o, ++seed));
}
BENCHMARK(BM_PairMotion);

void BM_LocalTimeCrossings(benchmark::State& state) {
  const std::size_t n = 1000000;
  std::vector<double> w(n);
  bf::IncrementStream(6, bf::StreamLabel::plus(), 1e-6).fill(w);
  std::vector<double> b = bf::cumulate(w);
  for (double& v : b) v = std::abs(v);
  bf::CrossingOptions co;
  co.bridge = bf::BridgeModel::reflected;
  co.step_variance = 1e-6;
  for (auto _ : state) benchmark::DoNotOptimize(bf::local_time_crossings(b, 0.01, co));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LocalTimeCrossings);

}  // namespace
