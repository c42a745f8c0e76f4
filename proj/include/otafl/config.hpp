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

#ifndef OTAFL_CONFIG_HPP_
#define OTAFL_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "otafl/fl_sim.hpp"

namespace otafl {

inline constexpr int kConfigSchemaVersion = 1;

// Raised for unknown keys, type mismatches and out-of-range values. `key` is
// the dotted path of the offending entry, e.g. "train.snr_dB".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Single-instance optimizer settings (solve-once, sweep-beta).
struct OptimizerConfig {
  std::vector<double> channel_magnitudes{0.50, 0.82, 0.85, 1.16, 2.09, 2.83};
  double snr_db = 10.0;
  std::optional<double> peak_power;     // overrides snr_db when present
  double alpha = 0.25;
  double beta = 1.0;                    // +inf allowed, written "inf"
  double noise_variance = 1.0;
  std::size_t dimension = 1;
  std::vector<double> sweep_snr_db{5.0, 10.0};
  double beta_min = 1e-3;
  double beta_max = 1e3;
  double beta_ratio = 1.01;
  bool include_beta_endpoints = true;   // add beta = 0 and beta = inf to the sweep
};

struct OracleCheckConfig {
  std::size_t k = 3;
  std::size_t trials = 100;
  double beta_min = 0.01;
  double beta_max = 100.0;
  double snr_db_min = 0.0;
  double snr_db_max = 20.0;
  std::size_t restarts = 50;
  double tolerance = 1e-6;              // allowed relative MSE gap
};

struct ExperimentConfig {
  std::size_t seeds = 20;
  std::vector<Scheme> schemes{Scheme::kAdaptive, Scheme::kKnownStats, Scheme::kThreshold,
                              Scheme::kFullPower, Scheme::kErrorFree};
  std::vector<double> snr_db_list{5.0, 10.0};
  std::vector<std::size_t> device_counts{4, 8, 12};
  std::size_t trend_blocks = 5;
};

struct RunConfig {
  OptimizerConfig optimizer;
  OracleCheckConfig oracle_check;
  TrainConfig train;
  ExperimentConfig experiment;
};

// Strict parse: every section and key is optional and falls back to the
// defaults above, but unknown keys and wrong types are rejected.
RunConfig parse_config(const nlohmann::json& document);
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::string& path);

// Fully populated document; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

// Deterministic serialization used for hashing and the manifest echo.
std::string canonical_dump(const nlohmann::json& document);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace otafl

#endif  // OTAFL_CONFIG_HPP_
