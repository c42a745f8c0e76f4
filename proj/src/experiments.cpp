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

#include "otafl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "otafl/rng.hpp"

namespace otafl {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

std::vector<double> block_means(std::span<const double> series, std::size_t blocks) {
  if (blocks == 0 || blocks > series.size()) {
    throw std::invalid_argument("block_means: need 1 <= blocks <= series length");
  }
  std::vector<double> out;
  out.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t begin = b * series.size() / blocks;
    const std::size_t end = (b + 1) * series.size() / blocks;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += series[i];
    out.push_back(sum / static_cast<double>(end - begin));
  }
  return out;
}

bool strictly_increasing(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(),
                            [](double a, double b) { return !(a < b); }) == values.end();
}

bool strictly_decreasing(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(),
                            [](double a, double b) { return !(a > b); }) == values.end();
}

std::vector<std::uint64_t> consecutive_seeds(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = base + i;
  return seeds;
}

std::vector<OracleCheckRow> run_oracle_check(const OracleCheckOptions& options,
                                             Execution execution) {
  if (options.device_count == 0) throw std::invalid_argument("oracle check: k must be >= 1");
  if (!(options.beta_min > 0.0 && options.beta_max >= options.beta_min)) {
    throw std::invalid_argument("oracle check: need 0 < beta_min <= beta_max");
  }
  if (!(options.snr_db_max >= options.snr_db_min)) {
    throw std::invalid_argument("oracle check: need snr_db_min <= snr_db_max");
  }
  std::vector<OracleCheckRow> rows;
  rows.reserve(options.trials);
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    Engine engine = make_engine(options.seed, trial, Stream::kOracle);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    OracleCheckRow row;
    row.trial = trial;
    const double log_lo = std::log(options.beta_min);
    const double log_hi = std::log(options.beta_max);
    row.stats.alpha = options.alpha;
    row.stats.beta = std::exp(log_lo + (log_hi - log_lo) * unit(engine));
    row.snr_db = options.snr_db_min + (options.snr_db_max - options.snr_db_min) * unit(engine);

    NoiseSpec noise;
    noise.variance = options.noise_variance;
    noise.dimension = options.dimension;
    const double peak = peak_power_from_snr_db(row.snr_db, noise);
    row.channels = sample_rayleigh_channels(options.device_count,
                                            derive_seed(options.seed, trial, Stream::kChannel),
                                            peak);

    const AggregationProfile profile = build_profile(row.channels, row.stats.alpha);
    const PowerSolution closed_form = solve(profile, row.stats, noise);
    OracleOptions oracle_options = options.oracle;
    oracle_options.seed = derive_seed(options.oracle.seed, trial, Stream::kOracle);
    const OracleResult oracle = oracle_solve(profile, row.stats, noise, oracle_options, execution);

    row.solve_mse = closed_form.mse.total;
    row.oracle_mse = oracle.best.mse.total;
    row.relative_gap = (row.solve_mse - row.oracle_mse) / row.oracle_mse;
    row.l_star = closed_form.l_star;
    row.l_star_interval = select_lstar_by_interval(profile, row.stats, noise);
    row.oracle_budget_exhausted = oracle.budget_exhausted;
    rows.push_back(std::move(row));
  }
  return rows;
}

SchemeOutcome summarize_runs(Scheme scheme, std::vector<ExperimentResult> runs) {
  if (runs.empty()) throw std::invalid_argument("summarize_runs: no runs");
  SchemeOutcome outcome;
  outcome.scheme = scheme;
  std::vector<double> accuracy;
  std::vector<double> loss;
  for (const auto& run : runs) {
    accuracy.push_back(run.summary.final_accuracy);
    loss.push_back(run.summary.final_loss);
  }
  outcome.median_accuracy = median(accuracy);
  outcome.accuracy_q25 = quantile(accuracy, 0.25);
  outcome.accuracy_q75 = quantile(accuracy, 0.75);
  outcome.median_loss = median(loss);
  outcome.runs = std::move(runs);
  return outcome;
}

std::vector<SchemeOutcome> compare_schemes(const TrainConfig& base,
                                           std::span<const Scheme> schemes,
                                           std::span<const std::uint64_t> seeds,
                                           Execution execution) {
  std::vector<SchemeOutcome> outcomes;
  for (Scheme scheme : schemes) {
    TrainConfig config = base;
    config.scheme = scheme;
    outcomes.push_back(summarize_runs(scheme, run_seeds(config, seeds, execution)));
  }
  return outcomes;
}

StatsTrajectory gradient_stats_trajectory(const TrainConfig& base, Partition partition,
                                          std::span<const std::uint64_t> seeds,
                                          Execution execution) {
  if (seeds.empty()) throw std::invalid_argument("gradient_stats_trajectory: no seeds");
  TrainConfig config = base;
  config.scheme = Scheme::kErrorFree;
  config.partition = partition;
  config.track_true_stats = true;
  // Test metrics are not needed for the trajectory; evaluate only at the end.
  config.eval_every = config.rounds;
  const std::vector<ExperimentResult> runs = run_seeds(config, seeds, execution);

  StatsTrajectory trajectory;
  trajectory.partition = partition;
  for (std::size_t t = 0; t < config.rounds; ++t) {
    std::vector<double> alpha;
    std::vector<double> beta;
    for (const auto& run : runs) {
      alpha.push_back(run.traces[t].true_alpha);
      beta.push_back(run.traces[t].true_beta);
    }
    trajectory.alpha_median.push_back(median(std::move(alpha)));
    trajectory.beta_median.push_back(median(std::move(beta)));
  }
  return trajectory;
}

TrajectoryShape assess_trajectory_shape(const StatsTrajectory& noniid, const StatsTrajectory& iid,
                                        std::size_t blocks) {
  TrajectoryShape shape;
  shape.noniid_alpha_blocks = block_means(noniid.alpha_median, blocks);
  shape.noniid_beta_blocks = block_means(noniid.beta_median, blocks);
  shape.iid_alpha_blocks = block_means(iid.alpha_median, blocks);
  shape.iid_beta_blocks = block_means(iid.beta_median, blocks);
  shape.alpha_decreasing = strictly_decreasing(shape.noniid_alpha_blocks) &&
                           strictly_decreasing(shape.iid_alpha_blocks);
  shape.beta_increasing = strictly_increasing(shape.noniid_beta_blocks) &&
                          strictly_increasing(shape.iid_beta_blocks);
  shape.noniid_beta_exceeds_iid = true;
  for (std::size_t b = 0; b < blocks; ++b) {
    if (!(shape.noniid_beta_blocks[b] > shape.iid_beta_blocks[b])) {
      shape.noniid_beta_exceeds_iid = false;
    }
  }
  return shape;
}

}  // namespace otafl
