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

#ifndef OTAFL_EXPERIMENTS_HPP_
#define OTAFL_EXPERIMENTS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otafl/channel_model.hpp"
#include "otafl/execution.hpp"
#include "otafl/fl_sim.hpp"
#include "otafl/gradient_stats.hpp"
#include "otafl/oracle.hpp"
#include "otafl/power_optimizer.hpp"

namespace otafl {

// Order statistics with linear interpolation between ranks. Both throw
// std::invalid_argument on an empty sample.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

// Means of `blocks` consecutive, near-equal, non-overlapping windows.
std::vector<double> block_means(std::span<const double> series, std::size_t blocks);

bool strictly_increasing(std::span<const double> values);
bool strictly_decreasing(std::span<const double> values);

// base, base + 1, ..., base + count - 1.
std::vector<std::uint64_t> consecutive_seeds(std::uint64_t base, std::size_t count);

// ---------------------------------------------------------------------------
// Closed-form solver against the structure-free oracle.

struct OracleCheckOptions {
  std::size_t device_count = 3;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double beta_min = 0.01;      // beta is log-uniform on [beta_min, beta_max]
  double beta_max = 100.0;
  double snr_db_min = 0.0;     // SNR is uniform on [snr_db_min, snr_db_max]
  double snr_db_max = 20.0;
  double alpha = 1.0;
  std::size_t dimension = 1;
  double noise_variance = 1.0;
  OracleOptions oracle;
};

struct OracleCheckRow {
  std::size_t trial = 0;
  std::vector<DeviceChannel> channels;
  GradientStats stats;
  double snr_db = 0.0;
  double solve_mse = 0.0;
  double oracle_mse = 0.0;
  double relative_gap = 0.0;          // (solve - oracle) / oracle
  std::size_t l_star = 0;             // argmin over subregion candidates
  std::size_t l_star_interval = 0;    // first l passing the interval test
  bool oracle_budget_exhausted = false;
};

// Random instances are derived from (seed, trial) alone, so any subset of
// trials can be regenerated independently.
std::vector<OracleCheckRow> run_oracle_check(const OracleCheckOptions& options,
                                             Execution execution = Execution::kParallel);

// ---------------------------------------------------------------------------
// Federated runs summarised over seeds.

struct SchemeOutcome {
  Scheme scheme = Scheme::kAdaptive;
  std::vector<ExperimentResult> runs;   // seed order
  double median_accuracy = 0.0;
  double accuracy_q25 = 0.0;
  double accuracy_q75 = 0.0;
  double median_loss = 0.0;
};

SchemeOutcome summarize_runs(Scheme scheme, std::vector<ExperimentResult> runs);

// Every scheme runs under the same seeds, so datasets, partitions, channels
// and mini-batches coincide across schemes for a given seed.
std::vector<SchemeOutcome> compare_schemes(const TrainConfig& base,
                                           std::span<const Scheme> schemes,
                                           std::span<const std::uint64_t> seeds,
                                           Execution execution = Execution::kParallel);

// Per-round medians over seeds of the true gradient statistics, measured on
// error-free training so the trajectory is a property of the task alone.
struct StatsTrajectory {
  Partition partition = Partition::kNonIid;
  std::vector<double> alpha_median;   // index t - 1
  std::vector<double> beta_median;
};

StatsTrajectory gradient_stats_trajectory(const TrainConfig& base, Partition partition,
                                          std::span<const std::uint64_t> seeds,
                                          Execution execution = Execution::kParallel);

struct TrajectoryShape {
  std::vector<double> noniid_alpha_blocks;
  std::vector<double> noniid_beta_blocks;
  std::vector<double> iid_alpha_blocks;
  std::vector<double> iid_beta_blocks;
  bool alpha_decreasing = false;        // both partitions
  bool beta_increasing = false;         // both partitions
  bool noniid_beta_exceeds_iid = false; // every block
};

TrajectoryShape assess_trajectory_shape(const StatsTrajectory& noniid, const StatsTrajectory& iid,
                                        std::size_t blocks);

}  // namespace otafl

#endif  // OTAFL_EXPERIMENTS_HPP_
