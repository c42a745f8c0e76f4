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

#ifndef OTAFL_CHANNEL_MODEL_HPP_
#define OTAFL_CHANNEL_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otafl/execution.hpp"

namespace otafl {

struct GradientMoments;

struct DeviceChannel {
  double magnitude = 0.0;   // |h_k|
  double phase = 0.0;       // theta_k in [-pi, pi)
  double peak_power = 1.0;  // P_k
};

struct NoiseSpec {
  double variance = 1.0;       // per-element noise variance
  std::size_t dimension = 1;   // gradient dimension D

  double total() const { return static_cast<double>(dimension) * variance; }
};

// One AirComp uplink: what each device sends and how the server recovers it.
struct AircompRound {
  std::vector<std::vector<double>> gradients;  // K vectors of length D
  std::vector<DeviceChannel> channels;         // K
  std::vector<double> powers;                  // p_k
  std::vector<double> alphas;                  // alpha_k in b_k = sqrt(p_k / alpha_k) e^{-j theta_k}
  double denoising_factor = 1.0;               // eta
};

void validate(const DeviceChannel& channel);
void validate(const NoiseSpec& noise);

// Unit-variance circularly-symmetric complex Gaussian channels, every device
// with the same peak power. Throws std::invalid_argument when count == 0.
std::vector<DeviceChannel> sample_rayleigh_channels(std::size_t count, std::uint64_t seed,
                                                    double peak_power = 1.0);

// Peak power giving the requested average received SNR, P = 10^(snr/10) * D * sigma_n^2.
double peak_power_from_snr_db(double snr_db, const NoiseSpec& noise);

// Superposition over the phase-compensated channel followed by the
// denoise-and-average recovery. Returns the recovered gradient (length D).
std::vector<double> aircomp_transmit(const AircompRound& round, const NoiseSpec& noise,
                                     std::uint64_t seed);

// Same as above with the noise vector supplied by the caller.
std::vector<double> aircomp_transmit_with_noise(const AircompRound& round,
                                                std::span<const double> noise);

std::vector<double> draw_noise(const NoiseSpec& noise, std::uint64_t seed);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t replicas = 0;
};

// Empirical E||g_hat - g||^2 where g is the exact device average. Gradients are
// redrawn from `moments` and noise is redrawn in every replica.
MonteCarloEstimate simulate_mse(const GradientMoments& moments, std::span<const double> powers,
                                std::span<const DeviceChannel> channels, double eta,
                                const NoiseSpec& noise, std::size_t replicas, std::uint64_t seed,
                                Execution execution = Execution::kParallel);

}  // namespace otafl

#endif  // OTAFL_CHANNEL_MODEL_HPP_
