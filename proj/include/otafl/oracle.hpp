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

#ifndef OTAFL_ORACLE_HPP_
#define OTAFL_ORACLE_HPP_

#include <cstddef>
#include <cstdint>

#include "otafl/execution.hpp"
#include "otafl/power_optimizer.hpp"

namespace otafl {

// Structure-free minimizer of the (alpha, beta) MSE over 0 <= p_k <= P_k and
// eta > 0, used to check the closed-form solver. It never looks at the
// capability ordering or the subregion decomposition.
struct OracleOptions {
  std::size_t restarts = 50;
  std::size_t max_sweeps = 400;
  std::size_t golden_iterations = 80;
  std::size_t grid_points = 16;          // per axis, dense grid only for K <= 3
  std::size_t grid_refinements = 4;      // best grid points refined by coordinate descent
  std::size_t evaluation_budget = 50'000'000;
  std::uint64_t seed = 7;
};

struct OracleResult {
  PowerSolution best;
  std::size_t evaluations = 0;
  bool budget_exhausted = false;   // best-so-far returned
};

OracleResult oracle_solve(const AggregationProfile& profile, const GradientStats& stats,
                          const NoiseSpec& noise, const OracleOptions& options = {},
                          Execution execution = Execution::kParallel);

}  // namespace otafl

#endif  // OTAFL_ORACLE_HPP_
