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

#include "otafl/fl_sim.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>

#include "otafl/power_optimizer.hpp"
#include "otafl/rng.hpp"

namespace otafl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct NamedScheme {
  Scheme scheme;
  const char* name;
};
constexpr NamedScheme kSchemes[] = {
    {Scheme::kAdaptive, "adaptive"},
    {Scheme::kKnownStats, "known_stats"},
    {Scheme::kThreshold, "threshold_beta_inf"},
    {Scheme::kFullPower, "full_power"},
    {Scheme::kErrorFree, "error_free"},
};

NoiseSpec noise_of(const TrainConfig& config) {
  return NoiseSpec{config.noise_variance, config.dimension};
}

std::vector<DeviceChannel> channels_for_round(const FlState& state, const TrainConfig& config,
                                              std::size_t round) {
  if (config.freeze_channel) return state.frozen_channels;
  const double peak = peak_power_from_snr_db(config.snr_db, noise_of(config));
  return sample_rayleigh_channels(config.device_count,
                                  derive_seed(config.master_seed, round, Stream::kChannel), peak);
}

}  // namespace

std::string to_string(Scheme scheme) {
  for (const auto& s : kSchemes) {
    if (s.scheme == scheme) return s.name;
  }
  throw std::invalid_argument("unknown scheme");
}

Scheme scheme_from_string(const std::string& name) {
  for (const auto& s : kSchemes) {
    if (name == s.name) return s.scheme;
  }
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string to_string(Partition partition) {
  return partition == Partition::kIid ? "iid" : "noniid";
}

Partition partition_from_string(const std::string& name) {
  if (name == "iid") return Partition::kIid;
  if (name == "noniid") return Partition::kNonIid;
  throw std::invalid_argument("unknown partition '" + name + "'");
}

void validate(const TrainConfig& c) {
  if (c.device_count < 1) throw std::invalid_argument("device_count must be >= 1");
  if (c.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (!(c.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (c.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(c.noise_variance >= 0.0)) throw std::invalid_argument("noise_variance must be >= 0");
  if (!(c.beta_init >= 0.0)) throw std::invalid_argument("beta_init must be >= 0");
  if (c.stats_samples < 2) throw std::invalid_argument("stats_samples must be >= 2");
  if (c.eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  if (!std::isfinite(c.snr_db)) throw std::invalid_argument("snr_db must be finite");
}

TaskSpec task_spec(const TrainConfig& c) {
  TaskSpec spec;
  spec.num_samples = c.num_samples;
  spec.num_classes = c.num_classes;
  spec.dimension = c.dimension;
  spec.test_fraction = c.test_fraction;
  spec.class_separation = c.class_separation;
  spec.feature_scale_min = c.feature_scale_min;
  return spec;
}

FlState init_state(const TrainConfig& config) {
  validate(config);
  FlState state;
  state.task = std::make_shared<const SyntheticTask>(
      make_synthetic_task(task_spec(config), config.master_seed));
  state.shards = partition_data(state.task->train, config.device_count, config.partition,
                                config.master_seed);
  state.model.assign(state.task->dimension(), 0.0);
  state.beta_hat = config.beta_init;
  state.next_round = 1;
  if (config.freeze_channel) {
    const double peak = peak_power_from_snr_db(config.snr_db, noise_of(config));
    state.frozen_channels = sample_rayleigh_channels(
        config.device_count, derive_seed(config.master_seed, 0, Stream::kChannel), peak);
  }
  return state;
}

GradientStats true_gradient_stats(const FlState& state, const TrainConfig& config,
                                  std::size_t round) {
  Engine engine = make_engine(config.master_seed, round, Stream::kTrueStats);
  std::uniform_int_distribution<std::size_t> pick(0, state.shards.size() - 1);
  std::vector<std::vector<double>> samples;
  samples.reserve(config.stats_samples);
  for (std::size_t i = 0; i < config.stats_samples; ++i) {
    const auto& shard = state.shards[pick(engine)];
    samples.push_back(
        local_sgd_gradient(*state.task, state.model, shard, config.batch_size, engine).gradient);
  }
  const GradientMoments m = empirical_moments(samples);
  const double var = m.sum_variances();
  // The squared sample mean overstates sum m_d^2 by sum sigma_d^2 / n.
  const double mean_sq =
      std::max(m.sum_mean_squares() - var / static_cast<double>(samples.size()), 0.0);
  GradientStats stats;
  stats.alpha = var + mean_sq;
  stats.beta = mean_sq == 0.0 ? kInfiniteBeta : var / mean_sq;
  return stats;
}

RoundTrace run_round(FlState& state, const TrainConfig& config) {
  const std::size_t t = state.next_round;
  try {
    const SyntheticTask& task = *state.task;
    const std::size_t k_count = config.device_count;
    const NoiseSpec noise = noise_of(config);

    RoundTrace trace;
    trace.t = t;
    trace.scheme = config.scheme;
    trace.beta_hat = state.beta_hat;
    trace.true_alpha = kNaN;
    trace.true_beta = kNaN;

    std::vector<std::vector<double>> gradients(k_count);
    std::vector<double> norms(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      Engine engine = make_engine(config.master_seed, t, Stream::kMiniBatch, k);
      LocalGradient lg =
          local_sgd_gradient(task, state.model, state.shards[k], config.batch_size, engine);
      gradients[k] = std::move(lg.gradient);
      norms[k] = lg.norm;
    }
    trace.alpha_hat = estimate_alpha(norms);

    if (config.track_true_stats || config.scheme == Scheme::kKnownStats) {
      const GradientStats truth = true_gradient_stats(state, config, t);
      trace.true_alpha = truth.alpha;
      trace.true_beta = truth.beta;
    }

    std::vector<double> recovered;
    if (config.scheme == Scheme::kErrorFree) {
      recovered.assign(task.dimension(), 0.0);
      for (const auto& g : gradients) {
        for (std::size_t d = 0; d < g.size(); ++d) recovered[d] += g[d];
      }
      for (double& v : recovered) v /= static_cast<double>(k_count);
      trace.alpha_used = kNaN;
      trace.beta_used = kNaN;
      trace.eta = kNaN;
      trace.mse_analytic = 0.0;
    } else {
      GradientStats used{trace.alpha_hat, state.beta_hat};
      if (config.scheme == Scheme::kKnownStats) used = {trace.true_alpha, trace.true_beta};
      if (config.scheme == Scheme::kThreshold) used.beta = kInfiniteBeta;
      trace.alpha_used = used.alpha;
      trace.beta_used = used.beta;

      const std::vector<DeviceChannel> channels = channels_for_round(state, config, t);
      const AggregationProfile profile = build_profile(channels, used.alpha);
      const PowerSolution sol = config.scheme == Scheme::kFullPower
                                    ? full_power_solution(profile, used, noise)
                                    : solve(profile, used, noise);
      trace.powers = sol.powers;
      trace.eta = sol.eta;
      trace.l_star = sol.l_star;
      trace.mse_analytic = sol.mse.total;

      AircompRound round;
      round.gradients = std::move(gradients);
      round.channels = channels;
      round.powers = sol.powers;
      round.alphas.assign(k_count, used.alpha);
      round.denoising_factor = sol.eta;
      recovered = aircomp_transmit(round, noise, derive_seed(config.master_seed, t, Stream::kNoise));
    }

    double sq = 0.0;
    for (double v : recovered) sq += v * v;
    trace.recovered_norm = std::sqrt(sq);

    if (trace.alpha_hat > 0.0) {
      state.beta_hat = estimate_beta(trace.alpha_hat, recovered);
      trace.beta_degenerate = std::isinf(state.beta_hat);
    }

    for (std::size_t d = 0; d < state.model.size(); ++d) {
      state.model[d] -= config.learning_rate * recovered[d];
    }

    if (t % config.eval_every == 0 || t == config.rounds) {
      trace.train_loss = mean_loss(task, state.model, task.train);
      trace.test_accuracy = accuracy(task, state.model, task.test);
    } else {
      trace.train_loss = kNaN;
      trace.test_accuracy = kNaN;
    }
    state.next_round = t + 1;
    return trace;
  } catch (const std::exception& e) {
    throw std::runtime_error("round " + std::to_string(t) + ": " + e.what());
  }
}

ExperimentResult run_experiment(const TrainConfig& config) {
  FlState state = init_state(config);
  ExperimentResult result;
  result.traces.reserve(config.rounds);
  for (std::size_t r = 0; r < config.rounds; ++r) result.traces.push_back(run_round(state, config));
  result.summary.scheme = config.scheme;
  result.summary.seed = config.master_seed;
  result.summary.rounds = config.rounds;
  result.summary.final_loss = result.traces.back().train_loss;
  result.summary.final_accuracy = result.traces.back().test_accuracy;
  return result;
}

std::vector<ExperimentResult> run_seeds(const TrainConfig& config,
                                        std::span<const std::uint64_t> seeds,
                                        Execution execution) {
  validate(config);
  std::vector<ExperimentResult> out(seeds.size());
  const auto n = static_cast<std::ptrdiff_t>(seeds.size());
  auto one = [&](std::ptrdiff_t i) {
    TrainConfig c = config;
    c.master_seed = seeds[i];
    out[i] = run_experiment(c);
  };
  if (execution == Execution::kParallel) {
    // Exceptions cannot cross the OpenMP region; capture the first one.
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        one(i);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  }
  return out;
}

}  // namespace otafl
