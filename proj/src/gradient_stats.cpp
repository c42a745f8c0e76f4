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

#include "otafl/gradient_stats.hpp"

#include <random>
#include <stdexcept>

namespace otafl {

double GradientMoments::sum_mean_squares() const {
  double s = 0.0;
  for (double m : means) s += m * m;
  return s;
}

double GradientMoments::sum_variances() const {
  double s = 0.0;
  for (double v : variances) s += v;
  return s;
}

void validate(const GradientMoments& moments) {
  if (moments.means.size() != moments.variances.size()) {
    throw std::invalid_argument("gradient moments: means and variances differ in length");
  }
  if (moments.means.empty()) throw std::invalid_argument("gradient moments: empty");
  for (double v : moments.variances) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("gradient moments: variances must be finite and nonnegative");
    }
  }
  for (double m : moments.means) {
    if (!std::isfinite(m)) throw std::invalid_argument("gradient moments: non-finite mean");
  }
}

void validate(const GradientStats& stats) {
  if (!(stats.alpha >= 0.0) || !std::isfinite(stats.alpha)) {
    throw std::invalid_argument("gradient stats: alpha must be finite and nonnegative");
  }
  if (!(stats.beta >= 0.0)) {
    throw std::invalid_argument("gradient stats: beta must be nonnegative or the infinity sentinel");
  }
}

GradientStats moments_to_stats(const GradientMoments& moments) {
  validate(moments);
  const double mean_sq = moments.sum_mean_squares();
  const double var = moments.sum_variances();
  if (mean_sq == 0.0 && var == 0.0) {
    throw std::domain_error("moments_to_stats: degenerate all-zero gradient");
  }
  GradientStats stats;
  stats.alpha = mean_sq + var;
  stats.beta = mean_sq == 0.0 ? kInfiniteBeta : var / mean_sq;
  return stats;
}

double estimate_alpha(std::span<const double> norms) {
  if (norms.empty()) throw std::invalid_argument("estimate_alpha: no gradient norms");
  double s = 0.0;
  for (double b : norms) {
    if (!(b >= 0.0)) throw std::invalid_argument("estimate_alpha: negative norm");
    s += b * b;
  }
  return s / static_cast<double>(norms.size());
}

double estimate_beta(double alpha_prev, std::span<const double> aggregated_prev) {
  if (!(alpha_prev > 0.0)) throw std::invalid_argument("estimate_beta: alpha_prev must be positive");
  double energy = 0.0;
  for (double g : aggregated_prev) energy += g * g;
  if (energy == 0.0) return kInfiniteBeta;
  const double raw = (alpha_prev - energy) / energy;
  return raw < 0.0 ? 0.0 : raw;
}

std::vector<std::vector<double>> sample_gradients(const GradientMoments& moments,
                                                  std::size_t device_count, Engine& engine) {
  validate(moments);
  const std::size_t dim = moments.dimension();
  std::vector<std::vector<double>> out(device_count, std::vector<double>(dim));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& g : out) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double sd = std::sqrt(moments.variances[d]);
      g[d] = sd == 0.0 ? moments.means[d] : moments.means[d] + sd * normal(engine);
    }
  }
  return out;
}

std::vector<std::vector<double>> sample_gradients(const GradientMoments& moments,
                                                  std::size_t device_count, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  return sample_gradients(moments, device_count, engine);
}

GradientMoments empirical_moments(std::span<const std::vector<double>> samples) {
  if (samples.size() < 2) throw std::invalid_argument("empirical_moments: need two or more samples");
  const std::size_t dim = samples.front().size();
  GradientMoments m;
  m.means.assign(dim, 0.0);
  m.variances.assign(dim, 0.0);
  for (const auto& s : samples) {
    if (s.size() != dim) throw std::invalid_argument("empirical_moments: dimension mismatch");
    for (std::size_t d = 0; d < dim; ++d) m.means[d] += s[d];
  }
  const double n = static_cast<double>(samples.size());
  for (double& v : m.means) v /= n;
  for (const auto& s : samples) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double c = s[d] - m.means[d];
      m.variances[d] += c * c;
    }
  }
  for (double& v : m.variances) v /= (n - 1.0);
  return m;
}

}  // namespace otafl
