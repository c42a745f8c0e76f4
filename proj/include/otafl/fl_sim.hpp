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

#ifndef OTAFL_FL_SIM_HPP_
#define OTAFL_FL_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otafl/channel_model.hpp"
#include "otafl/execution.hpp"
#include "otafl/gradient_stats.hpp"
#include "otafl/synthetic_task.hpp"

namespace otafl {

enum class Scheme {
  kAdaptive,      // estimated (alpha, beta) fed to the optimal policy
  kKnownStats,    // true (alpha, beta) fed to the optimal policy
  kThreshold,     // beta = inf policy
  kFullPower,     // peak power everywhere, best denoising factor for it
  kErrorFree,     // exact average, no channel
};

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);
std::string to_string(Partition partition);
Partition partition_from_string(const std::string& name);

struct TrainConfig {
  std::size_t device_count = 10;
  std::size_t dimension = 500;
  std::size_t num_classes = 10;
  std::size_t num_samples = 5000;
  double test_fraction = 0.2;
  double class_separation = 0.5;
  double feature_scale_min = 0.05;
  double learning_rate = 0.1;
  std::size_t batch_size = 50;
  std::size_t rounds = 200;
  double snr_db = 10.0;
  double noise_variance = 1.0;
  Partition partition = Partition::kNonIid;
  Scheme scheme = Scheme::kAdaptive;
  std::uint64_t master_seed = 1;
  double beta_init = 1.0;
  bool freeze_channel = false;
  std::size_t stats_samples = 200;   // gradient draws behind the true statistics
  bool track_true_stats = false;     // record true (alpha, beta) every round
  std::size_t eval_every = 1;        // test metrics every n rounds (always on the last)
};

void validate(const TrainConfig& config);
TaskSpec task_spec(const TrainConfig& config);

struct RoundTrace {
  std::size_t t = 0;
  Scheme scheme = Scheme::kAdaptive;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;             // estimate in force during this round
  double alpha_used = 0.0;
  double beta_used = 0.0;
  double true_alpha = 0.0;           // NaN unless tracked or needed by the scheme
  double true_beta = 0.0;
  std::vector<double> powers;        // empty for kErrorFree
  double eta = 0.0;
  std::size_t l_star = 0;
  double mse_analytic = 0.0;         // unscaled, under the statistics the scheme used
  double recovered_norm = 0.0;
  double train_loss = 0.0;           // after the update; NaN on rounds without evaluation
  double test_accuracy = 0.0;
  bool beta_degenerate = false;      // next beta estimate hit the zero-gradient sentinel
};

// Throws std::invalid_argument naming the first offending field.
void validate(const TrainConfig& config);

// Synthetic-task parameters carried by a training configuration.
TaskSpec task_spec(const TrainConfig& config);

// Mutable simulation state between rounds.
struct FlState {
  std::shared_ptr<const SyntheticTask> task;
  std::vector<std::vector<std::size_t>> shards;
  std::vector<double> model;
  double beta_hat = 1.0;
  std::size_t next_round = 1;
  std::vector<DeviceChannel> frozen_channels;
};

FlState init_state(const TrainConfig& config);

// True (alpha, beta) of the device gradient distribution at the current
// model, from `stats_samples` mini-batch gradients of uniformly drawn devices.
GradientStats true_gradient_stats(const FlState& state, const TrainConfig& config,
                                  std::size_t round);

// One iteration: local gradients and norms, alpha estimate, power control,
// AirComp uplink, next beta estimate, model update. Optimizer and channel
// errors are rethrown with the round index attached.
RoundTrace run_round(FlState& state, const TrainConfig& config);

struct ExperimentSummary {
  Scheme scheme = Scheme::kAdaptive;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  double final_loss = 0.0;
  double final_accuracy = 0.0;
};

struct ExperimentResult {
  std::vector<RoundTrace> traces;
  ExperimentSummary summary;
};

ExperimentResult run_experiment(const TrainConfig& config);

// Independent runs of `config` under each master seed, in seed order.
std::vector<ExperimentResult> run_seeds(const TrainConfig& config,
                                        std::span<const std::uint64_t> seeds,
                                        Execution execution = Execution::kParallel);

}  // namespace otafl

#endif  // OTAFL_FL_SIM_HPP_
