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

#ifndef OTAFL_POWER_OPTIMIZER_HPP_
#define OTAFL_POWER_OPTIMIZER_HPP_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "otafl/channel_model.hpp"
#include "otafl/gradient_stats.hpp"
#include "otafl/mse.hpp"

namespace otafl {

// Devices ranked by aggregation capability C_k = sqrt(P_k / alpha) * |h_k|.
// `order[i]` is the original index of the i-th weakest device; ties keep
// the original index order. `capabilities` is indexed by original device.
struct AggregationProfile {
  std::vector<DeviceChannel> channels;
  std::vector<std::size_t> order;
  std::vector<double> capabilities;
  double alpha = 0.0;

  std::size_t size() const { return channels.size(); }
  // Capability of the i-th device in ascending order, i in [0, K).
  double sorted_capability(std::size_t i) const { return capabilities[order[i]]; }
};

// Optimum of the relaxed subregion where the l weakest devices transmit at
// peak power and the rest share one aggregation level.
struct SubregionCandidate {
  std::size_t l = 0;             // 1-based prefix length
  std::vector<double> powers;    // by original device index
  double eta = 0.0;
  double value = 0.0;            // unscaled MSE at (powers, eta)
  bool legal = false;            // every tail power strictly below its peak
  double common_level = 0.0;     // shared aggregation level of the tail
};

enum class PolicyRegime {
  kGeneral,     // finite beta > 0
  kThreshold,   // beta = inf: channel inversion above a capability threshold
  kFullPower,   // beta = 0: every device at peak
};

struct PowerSolution {
  std::vector<double> powers;  // by original device index
  double eta = 0.0;
  std::size_t l_star = 0;      // 1-based
  MseBreakdown mse;
  PolicyRegime regime = PolicyRegime::kGeneral;
};

// Relative margin applied to the strict legality test p < P.
inline constexpr double kLegalityMargin = 1e-12;

AggregationProfile build_profile(std::span<const DeviceChannel> channels, double alpha);

// Closed-form candidate for one subregion, valid for finite beta > 0 and for
// the beta = inf sentinel (equal-level tail at G = 1). Throws
// std::domain_error when the prefix has zero total capability.
SubregionCandidate candidate_for_subregion(std::size_t l, const AggregationProfile& profile,
                                           const GradientStats& stats, const NoiseSpec& noise);

// Every candidate l = 1..K; candidates with a zero-capability prefix or a
// zero-gain tail device are reported as illegal with infinite value.
std::vector<SubregionCandidate> enumerate_candidates(const AggregationProfile& profile,
                                                     const GradientStats& stats,
                                                     const NoiseSpec& noise);

// Optimal powers and denoising factor. Dispatches beta = 0 to full power and
// beta = inf to the threshold policy. Throws std::domain_error when every
// channel is zero.
PowerSolution solve(const AggregationProfile& profile, const GradientStats& stats,
                    const NoiseSpec& noise);

// Every device at peak with the best denoising factor for that allocation.
PowerSolution full_power_solution(const AggregationProfile& profile, const GradientStats& stats,
                                  const NoiseSpec& noise);

// Checks C_{l*} <= sqrt(p_k) |h_k| / sqrt(alpha) < C_{l*+1} for every tail device.
bool verify_lstar_interval(const PowerSolution& solution, const AggregationProfile& profile,
                           const GradientStats& stats);

// O(K) threshold search: the first l whose candidate satisfies the interval
// condition above. Returns 0 if none does.
std::size_t select_lstar_by_interval(const AggregationProfile& profile, const GradientStats& stats,
                                     const NoiseSpec& noise);

struct BetaSweepRow {
  double beta = 0.0;
  PowerSolution solution;
};

// One solution per beta in an ascending grid; kInfiniteBeta is allowed as the last point.
std::vector<BetaSweepRow> sweep_beta(const AggregationProfile& profile, double alpha,
                                     const NoiseSpec& noise, std::span<const double> beta_grid);

// Multiplicative grid beta_min * ratio^i up to beta_max, optionally bracketed by 0 and inf.
std::vector<double> geometric_beta_grid(double beta_min, double beta_max, double ratio,
                                        bool include_endpoints);

// CSV schema: beta,l_star,p_1..p_K,eta,mse_total (powers by original index).
void write_sweep_csv(std::ostream& out, std::span<const BetaSweepRow> rows);

}  // namespace otafl

#endif  // OTAFL_POWER_OPTIMIZER_HPP_
