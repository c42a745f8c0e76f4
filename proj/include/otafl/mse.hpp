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

#ifndef OTAFL_MSE_HPP_
#define OTAFL_MSE_HPP_

#include <span>

#include "otafl/channel_model.hpp"
#include "otafl/gradient_stats.hpp"

namespace otafl {

// The three error terms of the recovered-gradient MSE. Values are unscaled
// unless scaled_by_k2 is set, in which case every term carries the 1/K^2
// averaging prefactor.
struct MseBreakdown {
  double individual = 0.0;  // per-device misalignment, weighted by gradient variance
  double composite = 0.0;   // misalignment of the level sum, weighted by gradient mean
  double noise = 0.0;
  double total = 0.0;
  bool scaled_by_k2 = false;
};

// Aggregation level G_k = sqrt(p / (eta * alpha)) * |h_k|.
double aggregation_level(double power, double magnitude, double eta, double alpha);

// Per-dimension form, from first and second moments.
MseBreakdown mse_raw(const GradientMoments& moments, std::span<const double> powers,
                     std::span<const DeviceChannel> channels, double eta, const NoiseSpec& noise,
                     bool scale_by_k2 = false);

// (alpha, beta) form. beta may be zero, finite or kInfiniteBeta.
MseBreakdown mse_ab(const GradientStats& stats, std::span<const double> powers,
                    std::span<const DeviceChannel> channels, double eta, const NoiseSpec& noise);

// Individual and composite weights beta*alpha/(beta+1) and alpha/(beta+1).
struct MisalignmentWeights {
  double individual = 0.0;
  double composite = 0.0;
};
MisalignmentWeights misalignment_weights(const GradientStats& stats);

// (alpha, beta) form evaluated directly on aggregation levels and eta.
MseBreakdown mse_from_levels(const GradientStats& stats, std::span<const double> levels,
                             double eta, const NoiseSpec& noise);

}  // namespace otafl

#endif  // OTAFL_MSE_HPP_
