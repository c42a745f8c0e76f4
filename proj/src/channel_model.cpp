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

#include "otafl/channel_model.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "otafl/gradient_stats.hpp"
#include "otafl/rng.hpp"

namespace otafl {

void validate(const DeviceChannel& channel) {
  if (!(channel.magnitude >= 0.0) || !std::isfinite(channel.magnitude)) {
    throw std::invalid_argument("channel magnitude must be finite and nonnegative");
  }
  if (!(channel.peak_power > 0.0) || !std::isfinite(channel.peak_power)) {
    throw std::invalid_argument("peak power must be finite and positive");
  }
  if (!(channel.phase >= -std::numbers::pi && channel.phase < std::numbers::pi)) {
    throw std::invalid_argument("channel phase must lie in [-pi, pi)");
  }
}

void validate(const NoiseSpec& noise) {
  if (!(noise.variance >= 0.0) || !std::isfinite(noise.variance)) {
    throw std::invalid_argument("noise variance must be finite and nonnegative");
  }
  if (noise.dimension == 0) throw std::invalid_argument("noise dimension must be >= 1");
}

std::vector<DeviceChannel> sample_rayleigh_channels(std::size_t count, std::uint64_t seed,
                                                    double peak_power) {
  if (count == 0) throw std::invalid_argument("sample_rayleigh_channels: count must be >= 1");
  if (!(peak_power > 0.0)) throw std::invalid_argument("peak power must be positive");
  Engine engine = make_engine(seed);
  // Real and imaginary parts each carry half of the unit variance.
  std::normal_distribution<double> component(0.0, std::sqrt(0.5));
  std::vector<DeviceChannel> channels(count);
  for (auto& channel : channels) {
    const double re = component(engine);
    const double im = component(engine);
    channel.magnitude = std::hypot(re, im);
    channel.phase = std::atan2(im, re);
    if (channel.phase >= std::numbers::pi) channel.phase -= 2.0 * std::numbers::pi;
    channel.peak_power = peak_power;
  }
  return channels;
}

double peak_power_from_snr_db(double snr_db, const NoiseSpec& noise) {
  validate(noise);
  return std::pow(10.0, snr_db / 10.0) * noise.total();
}

std::vector<double> draw_noise(const NoiseSpec& noise, std::uint64_t seed) {
  validate(noise);
  std::vector<double> out(noise.dimension, 0.0);
  if (noise.variance == 0.0) return out;
  Engine engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(noise.variance));
  for (auto& v : out) v = normal(engine);
  return out;
}

namespace {

bool is_zero(std::span<const double> v) {
  for (double x : v) {
    if (x != 0.0) return false;
  }
  return true;
}

// Real effective gain h_k * b_k after phase compensation.
std::vector<double> effective_gains(const AircompRound& round) {
  const std::size_t k_count = round.gradients.size();
  std::vector<double> gains(k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    const DeviceChannel& ch = round.channels[k];
    validate(ch);
    const double p = round.powers[k];
    if (!(p >= 0.0)) throw std::invalid_argument("transmit power must be nonnegative");
    if (p > ch.peak_power * (1.0 + 1e-12)) {
      throw std::invalid_argument("transmit power of device " + std::to_string(k) +
                                  " exceeds its peak power");
    }
    const double a = round.alphas[k];
    if (!(a > 0.0)) {
      if (is_zero(round.gradients[k])) continue;
      throw std::invalid_argument("pre-processing undefined: alpha of device " +
                                  std::to_string(k) + " is not positive");
    }
    const std::complex<double> h = std::polar(ch.magnitude, ch.phase);
    const std::complex<double> b = std::sqrt(p / a) * std::polar(1.0, -ch.phase);
    gains[k] = (h * b).real();
  }
  return gains;
}

}  // namespace

std::vector<double> aircomp_transmit_with_noise(const AircompRound& round,
                                                std::span<const double> noise) {
  const std::size_t k_count = round.gradients.size();
  if (k_count == 0) throw std::invalid_argument("aircomp_transmit: no devices");
  if (round.channels.size() != k_count || round.powers.size() != k_count ||
      round.alphas.size() != k_count) {
    throw std::invalid_argument("aircomp_transmit: per-device arrays disagree in length");
  }
  if (!(round.denoising_factor > 0.0)) {
    throw std::invalid_argument("aircomp_transmit: denoising factor must be positive");
  }
  const std::size_t dim = round.gradients.front().size();
  for (const auto& g : round.gradients) {
    if (g.size() != dim) throw std::invalid_argument("aircomp_transmit: dimension mismatch");
  }
  if (noise.size() != dim) throw std::invalid_argument("aircomp_transmit: noise dimension mismatch");

  const std::vector<double> gains = effective_gains(round);
  std::vector<double> y(noise.begin(), noise.end());
  for (std::size_t k = 0; k < k_count; ++k) {
    if (gains[k] == 0.0) continue;
    const auto& g = round.gradients[k];
    for (std::size_t d = 0; d < dim; ++d) y[d] += gains[k] * g[d];
  }
  const double scale = 1.0 / (static_cast<double>(k_count) * std::sqrt(round.denoising_factor));
  for (double& v : y) v *= scale;
  return y;
}

std::vector<double> aircomp_transmit(const AircompRound& round, const NoiseSpec& noise,
                                     std::uint64_t seed) {
  if (!round.gradients.empty() && round.gradients.front().size() != noise.dimension) {
    throw std::invalid_argument("aircomp_transmit: noise dimension mismatch");
  }
  const std::vector<double> n = draw_noise(noise, seed);
  return aircomp_transmit_with_noise(round, n);
}

namespace {

double mse_replica(const GradientMoments& moments, const AircompRound& shape,
                   const NoiseSpec& noise, std::uint64_t seed, std::size_t replica) {
  Engine engine = make_engine(seed, replica, Stream::kTrial);
  AircompRound round = shape;
  round.gradients = sample_gradients(moments, shape.channels.size(), engine);
  std::vector<double> n(noise.dimension, 0.0);
  if (noise.variance > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(noise.variance));
    for (auto& v : n) v = normal(engine);
  }
  const std::vector<double> recovered = aircomp_transmit_with_noise(round, n);
  const double inv_k = 1.0 / static_cast<double>(round.gradients.size());
  double err = 0.0;
  for (std::size_t d = 0; d < recovered.size(); ++d) {
    double avg = 0.0;
    for (const auto& g : round.gradients) avg += g[d];
    const double diff = recovered[d] - avg * inv_k;
    err += diff * diff;
  }
  return err;
}

}  // namespace

MonteCarloEstimate simulate_mse(const GradientMoments& moments, std::span<const double> powers,
                                std::span<const DeviceChannel> channels, double eta,
                                const NoiseSpec& noise, std::size_t replicas, std::uint64_t seed,
                                Execution execution) {
  validate(moments);
  validate(noise);
  if (moments.dimension() != noise.dimension) {
    throw std::invalid_argument("simulate_mse: moments and noise dimension differ");
  }
  if (replicas < 2) throw std::invalid_argument("simulate_mse: need at least two replicas");
  if (powers.size() != channels.size()) {
    throw std::invalid_argument("simulate_mse: powers and channels differ in length");
  }
  const GradientStats stats = moments_to_stats(moments);
  AircompRound shape;
  shape.channels.assign(channels.begin(), channels.end());
  shape.powers.assign(powers.begin(), powers.end());
  shape.alphas.assign(channels.size(), stats.alpha);
  shape.denoising_factor = eta;

  std::vector<double> errors(replicas, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(replicas);
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
      errors[r] = mse_replica(moments, shape, noise, seed, static_cast<std::size_t>(r));
    }
  } else {
    for (std::ptrdiff_t r = 0; r < n; ++r) {
      errors[r] = mse_replica(moments, shape, noise, seed, static_cast<std::size_t>(r));
    }
  }

  double sum = 0.0;
  for (double e : errors) sum += e;
  const double mean = sum / static_cast<double>(replicas);
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  const double variance = ss / static_cast<double>(replicas - 1);
  return {mean, std::sqrt(variance / static_cast<double>(replicas)), replicas};
}

}  // namespace otafl
