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

#include "otafl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace otafl {

using nlohmann::json;

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : "config key '" + key + "': " + message),
      key_(std::move(key)) {}

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Reads typed values out of one JSON object and remembers which keys were
// consumed, so that whatever is left over can be reported as unknown.
class Section {
 public:
  Section(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_, "expected a JSON object");
  }

  std::string path_of(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    known_.insert(key);
    const auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_number(*v, key);
  }

  void count(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) out = static_cast<std::size_t>(as_unsigned(*v, key));
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) out = as_unsigned(*v, key);
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(path_of(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void beta(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        if (v->get<std::string>() != "inf") {
          throw ConfigError(path_of(key), "expected a number or the string \"inf\"");
        }
        out = std::numeric_limits<double>::infinity();
      } else {
        out = as_number(*v, key);
      }
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else {
        out = as_number(*v, key);
      }
    }
  }

  void number_list(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      const json& arr = as_array(*v, key);
      out.clear();
      for (const auto& item : arr) out.push_back(as_number(item, key));
    }
  }

  void count_list(const std::string& key, std::vector<std::size_t>& out) {
    if (const json* v = find(key)) {
      const json& arr = as_array(*v, key);
      out.clear();
      for (const auto& item : arr) out.push_back(static_cast<std::size_t>(as_unsigned(item, key)));
    }
  }

  template <typename Enum, typename Parse>
  void named(const std::string& key, Enum& out, Parse parse) {
    if (const json* v = find(key)) out = as_named<Enum>(*v, key, parse);
  }

  template <typename Enum, typename Parse>
  void named_list(const std::string& key, std::vector<Enum>& out, Parse parse) {
    if (const json* v = find(key)) {
      const json& arr = as_array(*v, key);
      out.clear();
      for (const auto& item : arr) out.push_back(as_named<Enum>(item, key, parse));
    }
  }

  // Nested object, or nullptr when absent.
  const json* child(const std::string& key) { return find(key); }

  void reject_unknown() const {
    for (const auto& [key, value] : object_.items()) {
      if (known_.count(key) != 0) continue;
      std::string message = "unknown key";
      for (const auto& candidate : known_) {
        if (lowercase(candidate) == lowercase(key)) {
          message += " (did you mean '" + candidate + "'?)";
          break;
        }
      }
      throw ConfigError(path_of(key), message);
    }
  }

 private:
  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError(path_of(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path_of(key), "expected a finite number");
    return x;
  }

  std::uint64_t as_unsigned(const json& v, const std::string& key) const {
    if (!v.is_number_unsigned()) {
      throw ConfigError(path_of(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  const json& as_array(const json& v, const std::string& key) const {
    if (!v.is_array()) throw ConfigError(path_of(key), "expected an array");
    return v;
  }

  template <typename Enum, typename Parse>
  Enum as_named(const json& v, const std::string& key, Parse parse) const {
    if (!v.is_string()) throw ConfigError(path_of(key), "expected a string");
    try {
      return parse(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path_of(key), e.what());
    }
  }

  const json& object_;
  std::string path_;
  std::set<std::string> known_;
};

void require(bool condition, const std::string& key, const std::string& message) {
  if (!condition) throw ConfigError(key, message);
}

void parse_optimizer(Section& s, OptimizerConfig& c) {
  s.number_list("channel_magnitudes", c.channel_magnitudes);
  s.number("snr_db", c.snr_db);
  s.optional_number("peak_power", c.peak_power);
  s.number("alpha", c.alpha);
  s.beta("beta", c.beta);
  s.number("noise_variance", c.noise_variance);
  s.count("dimension", c.dimension);
  s.number_list("sweep_snr_db", c.sweep_snr_db);
  s.number("beta_min", c.beta_min);
  s.number("beta_max", c.beta_max);
  s.number("beta_ratio", c.beta_ratio);
  s.boolean("include_beta_endpoints", c.include_beta_endpoints);
  s.reject_unknown();

  require(!c.channel_magnitudes.empty(), s.path_of("channel_magnitudes"), "must not be empty");
  for (double h : c.channel_magnitudes) {
    require(h >= 0.0, s.path_of("channel_magnitudes"), "magnitudes must be >= 0");
  }
  require(!c.peak_power || *c.peak_power > 0.0, s.path_of("peak_power"), "must be positive");
  require(c.alpha > 0.0, s.path_of("alpha"), "must be positive");
  require(c.beta >= 0.0, s.path_of("beta"), "must be >= 0");
  require(c.noise_variance >= 0.0, s.path_of("noise_variance"), "must be >= 0");
  require(c.dimension >= 1, s.path_of("dimension"), "must be >= 1");
  require(!c.sweep_snr_db.empty(), s.path_of("sweep_snr_db"), "must not be empty");
  require(c.beta_min > 0.0, s.path_of("beta_min"), "must be positive");
  require(c.beta_max >= c.beta_min, s.path_of("beta_max"), "must be >= beta_min");
  require(c.beta_ratio > 1.0, s.path_of("beta_ratio"), "must exceed 1");
}

void parse_oracle(Section& s, OracleCheckConfig& c) {
  s.count("k", c.k);
  s.count("trials", c.trials);
  s.number("beta_min", c.beta_min);
  s.number("beta_max", c.beta_max);
  s.number("snr_db_min", c.snr_db_min);
  s.number("snr_db_max", c.snr_db_max);
  s.count("restarts", c.restarts);
  s.number("tolerance", c.tolerance);
  s.reject_unknown();

  require(c.k >= 1, s.path_of("k"), "must be >= 1");
  require(c.trials >= 1, s.path_of("trials"), "must be >= 1");
  require(c.beta_min > 0.0, s.path_of("beta_min"), "must be positive");
  require(c.beta_max >= c.beta_min, s.path_of("beta_max"), "must be >= beta_min");
  require(c.snr_db_max >= c.snr_db_min, s.path_of("snr_db_max"), "must be >= snr_db_min");
  require(c.restarts >= 1, s.path_of("restarts"), "must be >= 1");
  require(c.tolerance >= 0.0, s.path_of("tolerance"), "must be >= 0");
}

void parse_train(Section& s, TrainConfig& c) {
  s.count("device_count", c.device_count);
  s.count("dimension", c.dimension);
  s.count("num_classes", c.num_classes);
  s.count("num_samples", c.num_samples);
  s.number("test_fraction", c.test_fraction);
  s.number("class_separation", c.class_separation);
  s.number("feature_scale_min", c.feature_scale_min);
  s.number("learning_rate", c.learning_rate);
  s.count("batch_size", c.batch_size);
  s.count("rounds", c.rounds);
  s.number("snr_db", c.snr_db);
  s.number("noise_variance", c.noise_variance);
  s.named("partition", c.partition, partition_from_string);
  s.named("scheme", c.scheme, scheme_from_string);
  s.seed("master_seed", c.master_seed);
  s.number("beta_init", c.beta_init);
  s.boolean("freeze_channel", c.freeze_channel);
  s.count("stats_samples", c.stats_samples);
  s.boolean("track_true_stats", c.track_true_stats);
  s.count("eval_every", c.eval_every);
  s.reject_unknown();
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("train", e.what());
  }
}

void parse_experiment(Section& s, ExperimentConfig& c) {
  s.count("seeds", c.seeds);
  s.named_list("schemes", c.schemes, scheme_from_string);
  s.number_list("snr_db_list", c.snr_db_list);
  s.count_list("device_counts", c.device_counts);
  s.count("trend_blocks", c.trend_blocks);
  s.reject_unknown();

  require(c.seeds >= 1, s.path_of("seeds"), "must be >= 1");
  require(!c.schemes.empty(), s.path_of("schemes"), "must not be empty");
  std::set<Scheme> unique(c.schemes.begin(), c.schemes.end());
  require(unique.size() == c.schemes.size(), s.path_of("schemes"), "duplicate scheme");
  require(!c.snr_db_list.empty(), s.path_of("snr_db_list"), "must not be empty");
  require(!c.device_counts.empty(), s.path_of("device_counts"), "must not be empty");
  for (std::size_t k : c.device_counts) {
    require(k >= 1, s.path_of("device_counts"), "device counts must be >= 1");
  }
  require(c.trend_blocks >= 2, s.path_of("trend_blocks"), "must be >= 2");
}

json beta_to_json(double beta) {
  if (std::isinf(beta)) return "inf";
  return beta;
}

}  // namespace

RunConfig parse_config(const json& document) {
  RunConfig config;
  Section top(document, "");
  if (const json* v = top.find("schema_version")) {
    if (!v->is_number_integer() || v->get<std::int64_t>() != kConfigSchemaVersion) {
      throw ConfigError("schema_version",
                        "unsupported value (expected " + std::to_string(kConfigSchemaVersion) + ")");
    }
  }
  if (const json* v = top.child("optimizer")) {
    Section s(*v, "optimizer");
    parse_optimizer(s, config.optimizer);
  }
  if (const json* v = top.child("oracle_check")) {
    Section s(*v, "oracle_check");
    parse_oracle(s, config.oracle_check);
  }
  if (const json* v = top.child("train")) {
    Section s(*v, "train");
    parse_train(s, config.train);
  }
  if (const json* v = top.child("experiment")) {
    Section s(*v, "experiment");
    parse_experiment(s, config.experiment);
  }
  top.reject_unknown();
  return config;
}

RunConfig parse_config_text(std::string_view text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(document);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

json to_json(const RunConfig& config) {
  const OptimizerConfig& o = config.optimizer;
  json optimizer = {
      {"channel_magnitudes", o.channel_magnitudes},
      {"snr_db", o.snr_db},
      {"peak_power", o.peak_power ? json(*o.peak_power) : json(nullptr)},
      {"alpha", o.alpha},
      {"beta", beta_to_json(o.beta)},
      {"noise_variance", o.noise_variance},
      {"dimension", o.dimension},
      {"sweep_snr_db", o.sweep_snr_db},
      {"beta_min", o.beta_min},
      {"beta_max", o.beta_max},
      {"beta_ratio", o.beta_ratio},
      {"include_beta_endpoints", o.include_beta_endpoints},
  };

  const OracleCheckConfig& q = config.oracle_check;
  json oracle = {
      {"k", q.k},
      {"trials", q.trials},
      {"beta_min", q.beta_min},
      {"beta_max", q.beta_max},
      {"snr_db_min", q.snr_db_min},
      {"snr_db_max", q.snr_db_max},
      {"restarts", q.restarts},
      {"tolerance", q.tolerance},
  };

  const TrainConfig& t = config.train;
  json train = {
      {"device_count", t.device_count},
      {"dimension", t.dimension},
      {"num_classes", t.num_classes},
      {"num_samples", t.num_samples},
      {"test_fraction", t.test_fraction},
      {"class_separation", t.class_separation},
      {"feature_scale_min", t.feature_scale_min},
      {"learning_rate", t.learning_rate},
      {"batch_size", t.batch_size},
      {"rounds", t.rounds},
      {"snr_db", t.snr_db},
      {"noise_variance", t.noise_variance},
      {"partition", to_string(t.partition)},
      {"scheme", to_string(t.scheme)},
      {"master_seed", t.master_seed},
      {"beta_init", t.beta_init},
      {"freeze_channel", t.freeze_channel},
      {"stats_samples", t.stats_samples},
      {"track_true_stats", t.track_true_stats},
      {"eval_every", t.eval_every},
  };

  const ExperimentConfig& e = config.experiment;
  json schemes = json::array();
  for (Scheme s : e.schemes) schemes.push_back(to_string(s));
  json experiment = {
      {"seeds", e.seeds},
      {"schemes", schemes},
      {"snr_db_list", e.snr_db_list},
      {"device_counts", e.device_counts},
      {"trend_blocks", e.trend_blocks},
  };

  return json{{"schema_version", kConfigSchemaVersion},
              {"optimizer", optimizer},
              {"oracle_check", oracle},
              {"train", train},
              {"experiment", experiment}};
}

std::string canonical_dump(const json& document) { return document.dump(2) + "\n"; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace otafl
