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

#include "otafl/mse.hpp"

#include <cmath>
#include <stdexcept>

namespace otafl {

namespace {

void check_common(std::span<const double> powers, std::span<const DeviceChannel> channels,
                  double eta, const NoiseSpec& noise) {
  if (!(eta > 0.0)) throw std::invalid_argument("mse: denoising factor must be positive");
  if (powers.size() != channels.size()) {
    throw std::invalid_argument("mse: powers and channels differ in length");
  }
  if (powers.empty()) throw std::invalid_argument("mse: no devices");
  for (double p : powers) {
    if (!(p >= 0.0)) throw std::invalid_argument("mse: powers must be nonnegative");
  }
  validate(noise);
}

std::vector<double> levels_of(std::span<const double> powers,
                              std::span<const DeviceChannel> channels, double eta, double alpha) {
  std::vector<double> levels(powers.size());
  for (std::size_t k = 0; k < powers.size(); ++k) {
    levels[k] = aggregation_level(powers[k], channels[k].magnitude, eta, alpha);
  }
  return levels;
}

MseBreakdown combine(double var_weight, double mean_weight, std::span<const double> levels,
                     double eta, const NoiseSpec& noise) {
  double individual = 0.0;
  double level_sum = 0.0;
  for (double g : levels) {
    individual += (g - 1.0) * (g - 1.0);
    level_sum += g;
  }
  const double composite_gap = level_sum - static_cast<double>(levels.size());
  MseBreakdown out;
  out.individual = var_weight == 0.0 ? 0.0 : var_weight * individual;
  out.composite = mean_weight == 0.0 ? 0.0 : mean_weight * composite_gap * composite_gap;
  out.noise = noise.total() / eta;
  out.total = out.individual + out.composite + out.noise;
  return out;
}

}  // namespace

double aggregation_level(double power, double magnitude, double eta, double alpha) {
  return std::sqrt(power / (eta * alpha)) * magnitude;
}

MisalignmentWeights misalignment_weights(const GradientStats& stats) {
  validate(stats);
  if (stats.beta_is_infinite()) return {stats.alpha, 0.0};
  if (stats.beta == 0.0) return {0.0, stats.alpha};
  const double denom = stats.beta + 1.0;
  return {stats.beta * stats.alpha / denom, stats.alpha / denom};
}

MseBreakdown mse_raw(const GradientMoments& moments, std::span<const double> powers,
                     std::span<const DeviceChannel> channels, double eta, const NoiseSpec& noise,
                     bool scale_by_k2) {
  check_common(powers, channels, eta, noise);
  validate(moments);
  if (moments.dimension() != noise.dimension) {
    throw std::invalid_argument("mse_raw: moments and noise dimension differ");
  }
  const double var = moments.sum_variances();
  const double mean_sq = moments.sum_mean_squares();
  const double alpha = var + mean_sq;
  if (alpha == 0.0) throw std::domain_error("mse_raw: degenerate all-zero gradient");
  const std::vector<double> levels = levels_of(powers, channels, eta, alpha);
  MseBreakdown out = combine(var, mean_sq, levels, eta, noise);
  if (scale_by_k2) {
    const double k2 = static_cast<double>(powers.size()) * static_cast<double>(powers.size());
    out.individual /= k2;
    out.composite /= k2;
    out.noise /= k2;
    out.total = out.individual + out.composite + out.noise;
    out.scaled_by_k2 = true;
  }
  return out;
}

MseBreakdown mse_ab(const GradientStats& stats, std::span<const double> powers,
                    std::span<const DeviceChannel> channels, double eta, const NoiseSpec& noise) {
  check_common(powers, channels, eta, noise);
  validate(stats);
  if (!(stats.alpha > 0.0)) throw std::invalid_argument("mse_ab: alpha must be positive");
  const std::vector<double> levels = levels_of(powers, channels, eta, stats.alpha);
  return mse_from_levels(stats, levels, eta, noise);
}

MseBreakdown mse_from_levels(const GradientStats& stats, std::span<const double> levels,
                             double eta, const NoiseSpec& noise) {
  if (!(eta > 0.0)) throw std::invalid_argument("mse: denoising factor must be positive");
  const MisalignmentWeights w = misalignment_weights(stats);
  return combine(w.individual, w.composite, levels, eta, noise);
}

}  // namespace otafl
