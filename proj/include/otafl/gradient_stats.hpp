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

#ifndef OTAFL_GRADIENT_STATS_HPP_
#define OTAFL_GRADIENT_STATS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "otafl/rng.hpp"

namespace otafl {

// Per-dimension first and second moments of one device's gradient.
struct GradientMoments {
  std::vector<double> means;
  std::vector<double> variances;

  std::size_t dimension() const { return means.size(); }
  double sum_mean_squares() const;
  double sum_variances() const;
};

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

// alpha: mean squared norm (MSN) of the gradient.
// beta: squared multivariate coefficient of variation (SMCV); +inf is the
// sentinel for a zero-mean gradient and is always handled symbolically.
struct GradientStats {
  double alpha = 0.0;
  double beta = 0.0;

  bool beta_is_infinite() const { return std::isinf(beta); }
};

void validate(const GradientMoments& moments);
void validate(const GradientStats& stats);

GradientStats moments_to_stats(const GradientMoments& moments);

// Mean of the squared gradient norms reported by the devices.
double estimate_alpha(std::span<const double> norms);

// SMCV estimate from the previous round's alpha estimate and recovered
// gradient. Negative raw values are clamped to zero; a zero recovered
// gradient yields kInfiniteBeta.
double estimate_beta(double alpha_prev, std::span<const double> aggregated_prev);

// K independent draws with entry (k, d) ~ N(m_d, sigma_d^2).
std::vector<std::vector<double>> sample_gradients(const GradientMoments& moments,
                                                  std::size_t device_count, std::uint64_t seed);
std::vector<std::vector<double>> sample_gradients(const GradientMoments& moments,
                                                  std::size_t device_count, Engine& engine);

// Empirical per-dimension moments of a set of gradient samples (unbiased variance).
GradientMoments empirical_moments(std::span<const std::vector<double>> samples);

}  // namespace otafl

#endif  // OTAFL_GRADIENT_STATS_HPP_
