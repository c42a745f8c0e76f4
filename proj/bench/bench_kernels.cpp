/**
 * Copyright 2026 The otafl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference against the OpenMP path for the three parallel kernels.
// Each benchmark takes the execution mode as its first argument: 0 is serial
// and 1 is parallel. Results are bit-identical between the two modes, so only
// wall time differs.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "otafl/channel_model.hpp"
#include "otafl/execution.hpp"
#include "otafl/fl_sim.hpp"
#include "otafl/gradient_stats.hpp"
#include "otafl/oracle.hpp"
#include "otafl/power_optimizer.hpp"

namespace {

using otafl::Execution;

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

void BM_SimulateMse(benchmark::State& state) {
  const std::size_t dim = 64;
  otafl::GradientMoments moments{std::vector<double>(dim, 0.3), std::vector<double>(dim, 1.0)};
  const auto channels = otafl::sample_rayleigh_channels(8, 7, 10.0);
  const std::vector<double> powers(channels.size(), 5.0);
  const otafl::NoiseSpec noise{1.0, dim};
  for (auto _ : state) {
    auto est = otafl::simulate_mse(moments, powers, channels, 2.0, noise,
                                   static_cast<std::size_t>(state.range(1)), 3, mode(state));
    benchmark::DoNotOptimize(est.mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_SimulateMse)->Args({0, 20000})->Args({1, 20000})->Unit(benchmark::kMillisecond);

void BM_OracleSolve(benchmark::State& state) {
  const auto channels = otafl::sample_rayleigh_channels(4, 11, 10.0);
  const auto profile = otafl::build_profile(channels, 1.0);
  otafl::OracleOptions options;
  options.restarts = 16;
  for (auto _ : state) {
    auto r = otafl::oracle_solve(profile, otafl::GradientStats{1.0, 2.0}, otafl::NoiseSpec{1.0, 1},
                                 options, mode(state));
    benchmark::DoNotOptimize(r.best.mse.total);
  }
}
BENCHMARK(BM_OracleSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RunSeeds(benchmark::State& state) {
  otafl::TrainConfig config;
  config.rounds = 20;
  config.dimension = 100;
  config.num_samples = 1000;
  config.eval_every = config.rounds;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  for (auto _ : state) {
    auto runs = otafl::run_seeds(config, seeds, mode(state));
    benchmark::DoNotOptimize(runs.data());
  }
}
BENCHMARK(BM_RunSeeds)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
