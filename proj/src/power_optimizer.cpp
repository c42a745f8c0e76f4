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

#include "otafl/power_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace otafl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_stats_for_solver(const GradientStats& stats) {
  validate(stats);
  if (!(stats.alpha > 0.0)) throw std::invalid_argument("power optimizer: alpha must be positive");
}

struct PrefixSums {
  double linear = 0.0;     // sum of the l smallest capabilities
  double quadratic = 0.0;  // sum of their squares
};

PrefixSums prefix_sums(const AggregationProfile& profile, std::size_t l) {
  PrefixSums s;
  for (std::size_t i = 0; i < l; ++i) {
    const double c = profile.sorted_capability(i);
    s.linear += c;
    s.quadratic += c * c;
  }
  return s;
}

std::vector<double> peak_powers(const AggregationProfile& profile) {
  std::vector<double> p(profile.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = profile.channels[k].peak_power;
  return p;
}

// Denoising factor when every device transmits at peak and beta = 0.
double full_power_eta_beta_zero(const AggregationProfile& profile, const NoiseSpec& noise) {
  const double alpha = profile.alpha;
  const double sum_c = prefix_sums(profile, profile.size()).linear;
  const double k = static_cast<double>(profile.size());
  const double root = (alpha * sum_c * sum_c + noise.total()) / (alpha * k * sum_c);
  return root * root;
}

}  // namespace

AggregationProfile build_profile(std::span<const DeviceChannel> channels, double alpha) {
  if (channels.empty()) throw std::invalid_argument("build_profile: no devices");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("build_profile: alpha must be positive");
  }
  AggregationProfile profile;
  profile.channels.assign(channels.begin(), channels.end());
  profile.alpha = alpha;
  profile.capabilities.resize(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    validate(channels[k]);
    profile.capabilities[k] = std::sqrt(channels[k].peak_power / alpha) * channels[k].magnitude;
  }
  profile.order.resize(channels.size());
  std::iota(profile.order.begin(), profile.order.end(), std::size_t{0});
  std::stable_sort(profile.order.begin(), profile.order.end(), [&](std::size_t a, std::size_t b) {
    return profile.capabilities[a] < profile.capabilities[b];
  });
  return profile;
}

SubregionCandidate candidate_for_subregion(std::size_t l, const AggregationProfile& profile,
                                           const GradientStats& stats, const NoiseSpec& noise) {
  check_stats_for_solver(stats);
  validate(noise);
  const std::size_t k_count = profile.size();
  if (l < 1 || l > k_count) throw std::invalid_argument("candidate_for_subregion: l out of range");
  if (!(stats.beta > 0.0)) {
    throw std::invalid_argument("candidate_for_subregion: beta = 0 has no subregion form");
  }
  const PrefixSums s = prefix_sums(profile, l);
  if (!(s.linear > 0.0)) {
    throw std::domain_error("candidate_for_subregion: prefix has zero aggregation capability");
  }
  const double alpha = stats.alpha;
  const double noise_total = noise.total();
  const double k = static_cast<double>(k_count);
  const double tail = k - static_cast<double>(l);

  SubregionCandidate c;
  c.l = l;
  double sqrt_eta = 0.0;
  if (stats.beta_is_infinite()) {
    sqrt_eta = (alpha * s.quadratic + noise_total) / (alpha * s.linear);
    c.common_level = 1.0;
  } else {
    const double beta = stats.beta;
    const double w = beta * alpha / (beta + 1.0);
    const double r = beta + tail;
    sqrt_eta = (w * s.quadratic + w * s.linear * s.linear / r + noise_total) /
               (w * s.linear * (beta + k) / r);
    c.common_level = (beta + k - s.linear / sqrt_eta) / r;
  }
  c.eta = sqrt_eta * sqrt_eta;

  c.powers = peak_powers(profile);
  bool tail_reachable = true;
  c.legal = c.common_level >= 0.0;
  for (std::size_t i = l; i < k_count; ++i) {
    const std::size_t dev = profile.order[i];
    const double h = profile.channels[dev].magnitude;
    if (h == 0.0) {
      tail_reachable = false;
      c.powers[dev] = kInf;
      c.legal = false;
      continue;
    }
    const double p = c.common_level * c.common_level * alpha * c.eta / (h * h);
    c.powers[dev] = p;
    if (!(p < profile.channels[dev].peak_power * (1.0 - kLegalityMargin))) c.legal = false;
  }
  if (tail_reachable) {
    c.value = mse_ab(stats, c.powers, profile.channels, c.eta, noise).total;
  } else {
    c.value = kInf;
  }
  return c;
}

std::vector<SubregionCandidate> enumerate_candidates(const AggregationProfile& profile,
                                                     const GradientStats& stats,
                                                     const NoiseSpec& noise) {
  std::vector<SubregionCandidate> out;
  out.reserve(profile.size());
  for (std::size_t l = 1; l <= profile.size(); ++l) {
    if (!(prefix_sums(profile, l).linear > 0.0)) {
      SubregionCandidate c;
      c.l = l;
      c.eta = std::numeric_limits<double>::quiet_NaN();
      c.value = kInf;
      c.legal = false;
      out.push_back(std::move(c));
      continue;
    }
    out.push_back(candidate_for_subregion(l, profile, stats, noise));
  }
  return out;
}

PowerSolution full_power_solution(const AggregationProfile& profile, const GradientStats& stats,
                                  const NoiseSpec& noise) {
  check_stats_for_solver(stats);
  validate(noise);
  if (!(prefix_sums(profile, profile.size()).linear > 0.0)) {
    throw std::domain_error("full power: every channel is zero, no transmission possible");
  }
  PowerSolution sol;
  sol.powers = peak_powers(profile);
  sol.l_star = profile.size();
  if (stats.beta == 0.0) {
    sol.eta = full_power_eta_beta_zero(profile, noise);
    sol.regime = PolicyRegime::kFullPower;
  } else {
    sol.eta = candidate_for_subregion(profile.size(), profile, stats, noise).eta;
    sol.regime = stats.beta_is_infinite() ? PolicyRegime::kThreshold : PolicyRegime::kGeneral;
  }
  sol.mse = mse_ab(stats, sol.powers, profile.channels, sol.eta, noise);
  return sol;
}

PowerSolution solve(const AggregationProfile& profile, const GradientStats& stats,
                    const NoiseSpec& noise) {
  check_stats_for_solver(stats);
  validate(noise);
  if (profile.size() == 0) throw std::invalid_argument("solve: no devices");
  if (std::abs(profile.alpha - stats.alpha) > 1e-12 * stats.alpha) {
    throw std::invalid_argument("solve: profile was built for a different alpha");
  }
  if (!(prefix_sums(profile, profile.size()).linear > 0.0)) {
    throw std::domain_error("solve: every channel is zero, no transmission possible");
  }
  if (stats.beta == 0.0) return full_power_solution(profile, stats, noise);

  const std::vector<SubregionCandidate> candidates = enumerate_candidates(profile, stats, noise);
  const SubregionCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (!c.legal) continue;
    if (best == nullptr || c.value < best->value) best = &c;
  }
  if (best == nullptr) throw std::runtime_error("solve: no legal subregion candidate");

  PowerSolution sol;
  sol.powers = best->powers;
  sol.eta = best->eta;
  sol.l_star = best->l;
  sol.regime = stats.beta_is_infinite() ? PolicyRegime::kThreshold : PolicyRegime::kGeneral;
  sol.mse = mse_ab(stats, sol.powers, profile.channels, sol.eta, noise);
  return sol;
}

namespace {

bool tail_in_interval(const AggregationProfile& profile, std::size_t l,
                      std::span<const double> powers, double alpha) {
  const std::size_t k_count = profile.size();
  if (l >= k_count) return true;
  const double lower = profile.sorted_capability(l - 1);
  const double upper = profile.sorted_capability(l);
  for (std::size_t i = l; i < k_count; ++i) {
    const std::size_t dev = profile.order[i];
    const double p = powers[dev];
    if (!std::isfinite(p)) return false;
    const double level = std::sqrt(p) * profile.channels[dev].magnitude / std::sqrt(alpha);
    if (level < lower * (1.0 - 1e-9)) return false;
    if (!(level < upper)) return false;
  }
  return true;
}

}  // namespace

bool verify_lstar_interval(const PowerSolution& solution, const AggregationProfile& profile,
                           const GradientStats& stats) {
  if (solution.l_star < 1 || solution.l_star > profile.size()) return false;
  if (solution.powers.size() != profile.size()) return false;
  return tail_in_interval(profile, solution.l_star, solution.powers, stats.alpha);
}

std::size_t select_lstar_by_interval(const AggregationProfile& profile, const GradientStats& stats,
                                     const NoiseSpec& noise) {
  for (std::size_t l = 1; l <= profile.size(); ++l) {
    if (!(prefix_sums(profile, l).linear > 0.0)) continue;
    const SubregionCandidate c = candidate_for_subregion(l, profile, stats, noise);
    if (c.common_level < 0.0) continue;
    if (tail_in_interval(profile, l, c.powers, stats.alpha)) return l;
  }
  return 0;
}

std::vector<BetaSweepRow> sweep_beta(const AggregationProfile& profile, double alpha,
                                     const NoiseSpec& noise, std::span<const double> beta_grid) {
  for (std::size_t i = 1; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] >= beta_grid[i - 1])) {
      throw std::invalid_argument("sweep_beta: grid must be sorted ascending");
    }
  }
  const AggregationProfile p =
      profile.alpha == alpha ? profile : build_profile(profile.channels, alpha);
  std::vector<BetaSweepRow> rows;
  rows.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    rows.push_back({beta, solve(p, GradientStats{alpha, beta}, noise)});
  }
  return rows;
}

std::vector<double> geometric_beta_grid(double beta_min, double beta_max, double ratio,
                                        bool include_endpoints) {
  if (!(beta_min > 0.0) || !(beta_max >= beta_min) || !(ratio > 1.0)) {
    throw std::invalid_argument("geometric_beta_grid: need 0 < beta_min <= beta_max, ratio > 1");
  }
  std::vector<double> grid;
  if (include_endpoints) grid.push_back(0.0);
  for (std::size_t i = 0;; ++i) {
    const double b = beta_min * std::pow(ratio, static_cast<double>(i));
    if (b > beta_max * (1.0 + 1e-12)) break;
    grid.push_back(b);
  }
  if (include_endpoints) grid.push_back(kInfiniteBeta);
  return grid;
}

namespace {

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const BetaSweepRow> rows) {
  const std::size_t k_count = rows.empty() ? 0 : rows.front().solution.powers.size();
  out << "beta,l_star";
  for (std::size_t k = 1; k <= k_count; ++k) out << ",p_" << k;
  out << ",eta,mse_total\n";
  for (const auto& row : rows) {
    out << fmt_double(row.beta) << ',' << row.solution.l_star;
    for (double p : row.solution.powers) out << ',' << fmt_double(p);
    out << ',' << fmt_double(row.solution.eta) << ',' << fmt_double(row.solution.mse.total) << '\n';
  }
}

}  // namespace otafl
