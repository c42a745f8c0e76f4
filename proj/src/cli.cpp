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

#include "otafl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "otafl/config.hpp"
#include "otafl/experiments.hpp"
#include "otafl/fl_sim.hpp"
#include "otafl/power_optimizer.hpp"

namespace otafl {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string> kCommands = {"sweep-beta", "solve-once",  "oracle-check",
                                            "fl-run",     "fig2-stats",  "snr-sweep",
                                            "device-sweep"};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON has no infinity or NaN; infinities become strings, NaN becomes null.
json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string regime_name(PolicyRegime regime) {
  switch (regime) {
    case PolicyRegime::kGeneral: return "general";
    case PolicyRegime::kThreshold: return "threshold";
    case PolicyRegime::kFullPower: return "full_power";
  }
  return "unknown";
}

// Collects output files in memory and writes them together with a manifest.
class OutputSet {
 public:
  OutputSet(fs::path dir, std::string command, std::uint64_t seed, json config)
      : dir_(std::move(dir)), command_(std::move(command)), seed_(seed),
        config_(std::move(config)) {}

  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }

  void write(std::ostream& out) const {
    fs::create_directories(dir_);
    json outputs = json::array();
    for (const auto& [name, content] : files_) {
      write_file(dir_ / name, content);
      outputs.push_back({{"file", name}, {"bytes", content.size()},
                         {"fnv1a64", hex64(fnv1a64(content))}});
      out << "wrote " << (dir_ / name).string() << "\n";
    }
    const std::string config_text = canonical_dump(config_);
    json manifest = {
        {"schema_version", kManifestSchemaVersion},
        {"command", command_},
        {"seed", seed_},
        {"config_hash", hex64(fnv1a64(config_text))},
        {"config", config_},
        {"outputs", outputs},
        {"versions",
         {{"otafl", kVersion},
          {"config_schema", kConfigSchemaVersion},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION},
          {"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)}}},
    };
    write_file(dir_ / "manifest.json", canonical_dump(manifest));
    out << "wrote " << (dir_ / "manifest.json").string() << "\n";
  }

 private:
  static void write_file(const fs::path& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
    file << content;
    if (!file) throw std::runtime_error("failed writing '" + path.string() + "'");
  }

  fs::path dir_;
  std::string command_;
  std::uint64_t seed_;
  json config_;
  std::map<std::string, std::string> files_;
};

NoiseSpec optimizer_noise(const OptimizerConfig& c) { return NoiseSpec{c.noise_variance, c.dimension}; }

std::vector<DeviceChannel> optimizer_channels(const OptimizerConfig& c, double peak) {
  std::vector<DeviceChannel> channels;
  for (double h : c.channel_magnitudes) channels.push_back(DeviceChannel{h, 0.0, peak});
  return channels;
}

std::string snr_tag(double snr_db) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", snr_db);
  std::string tag = buf;
  std::replace(tag.begin(), tag.end(), '-', 'm');
  std::replace(tag.begin(), tag.end(), '.', 'p');
  return tag;
}

json solution_json(const PowerSolution& s) {
  json powers = json::array();
  for (double p : s.powers) powers.push_back(json_number(p));
  return {{"powers", powers},
          {"eta", json_number(s.eta)},
          {"l_star", s.l_star},
          {"regime", regime_name(s.regime)},
          {"mse",
           {{"individual", json_number(s.mse.individual)},
            {"composite", json_number(s.mse.composite)},
            {"noise", json_number(s.mse.noise)},
            {"total", json_number(s.mse.total)}}}};
}

// ---------------------------------------------------------------------------

void cmd_sweep_beta(const RunConfig& config, OutputSet& outputs, std::ostream& out) {
  const OptimizerConfig& c = config.optimizer;
  const NoiseSpec noise = optimizer_noise(c);
  const std::vector<double> grid =
      geometric_beta_grid(c.beta_min, c.beta_max, c.beta_ratio, c.include_beta_endpoints);
  json summary = json::array();
  for (double snr : c.sweep_snr_db) {
    const double peak = c.peak_power ? *c.peak_power : peak_power_from_snr_db(snr, noise);
    const auto channels = optimizer_channels(c, peak);
    const AggregationProfile profile = build_profile(channels, c.alpha);
    const std::vector<BetaSweepRow> rows = sweep_beta(profile, c.alpha, noise, grid);

    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    const std::string name = "sweep_beta_snr" + snr_tag(snr) + "dB.csv";
    outputs.add(name, csv.str());

    json transitions = json::array();
    double max_jump = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].solution.l_star != rows[i - 1].solution.l_star) {
        transitions.push_back({{"beta", json_number(rows[i].beta)},
                               {"l_star", rows[i].solution.l_star}});
      }
      if (std::isfinite(rows[i].beta) && rows[i - 1].beta > 0.0) {
        for (std::size_t k = 0; k < channels.size(); ++k) {
          max_jump = std::max(max_jump, std::abs(rows[i].solution.powers[k] -
                                                 rows[i - 1].solution.powers[k]) / peak);
        }
      }
    }
    summary.push_back({{"snr_db", snr},
                       {"peak_power", peak},
                       {"file", name},
                       {"grid_points", rows.size()},
                       {"l_star_transitions", transitions},
                       {"max_adjacent_power_jump_over_peak", max_jump}});
    out << "sweep-beta: SNR " << snr << " dB, " << rows.size() << " grid points, l* from "
        << rows.front().solution.l_star << " to " << rows.back().solution.l_star << "\n";
  }
  outputs.add("sweep_beta_summary.json", canonical_dump(json{{"sweeps", summary}}));
}

void cmd_solve_once(const RunConfig& config, OutputSet& outputs, std::ostream& out) {
  const OptimizerConfig& c = config.optimizer;
  const NoiseSpec noise = optimizer_noise(c);
  const double peak = c.peak_power ? *c.peak_power : peak_power_from_snr_db(c.snr_db, noise);
  const auto channels = optimizer_channels(c, peak);
  const AggregationProfile profile = build_profile(channels, c.alpha);
  const GradientStats stats{c.alpha, c.beta};
  const PowerSolution solution = solve(profile, stats, noise);

  const std::vector<BetaSweepRow> rows{BetaSweepRow{c.beta, solution}};
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  outputs.add("solve_once.csv", csv.str());

  json candidates = json::array();
  if (c.beta > 0.0) {
    for (const auto& cand : enumerate_candidates(profile, stats, noise)) {
      candidates.push_back({{"l", cand.l},
                            {"legal", cand.legal},
                            {"eta", json_number(cand.eta)},
                            {"mse", json_number(cand.value)},
                            {"common_level", json_number(cand.common_level)}});
    }
  }
  json order = json::array();
  for (std::size_t idx : profile.order) order.push_back(idx + 1);
  json result = solution_json(solution);
  result["peak_power"] = peak;
  result["alpha"] = c.alpha;
  result["beta"] = json_number(c.beta);
  result["capability_order"] = order;
  result["candidates"] = candidates;
  result["interval_check"] = verify_lstar_interval(solution, profile, stats);
  outputs.add("solve_once.json", canonical_dump(result));
  out << "solve-once: l* = " << solution.l_star << ", eta = " << num(solution.eta)
      << ", mse = " << num(solution.mse.total) << "\n";
}

bool cmd_oracle_check(const RunConfig& config, std::uint64_t seed, OutputSet& outputs,
                      std::ostream& out, std::ostream& err) {
  const OracleCheckConfig& c = config.oracle_check;
  OracleCheckOptions options;
  options.device_count = c.k;
  options.trials = c.trials;
  options.seed = seed;
  options.beta_min = c.beta_min;
  options.beta_max = c.beta_max;
  options.snr_db_min = c.snr_db_min;
  options.snr_db_max = c.snr_db_max;
  options.oracle.restarts = c.restarts;
  const auto rows = run_oracle_check(options);

  std::ostringstream csv;
  csv << "trial,k,alpha,beta,snr_db,solve_mse,oracle_mse,relative_gap,l_star,l_star_interval,"
         "l_star_agree,oracle_budget_exhausted\n";
  double max_gap = -std::numeric_limits<double>::infinity();
  std::size_t agree = 0;
  std::size_t exhausted = 0;
  for (const auto& r : rows) {
    csv << r.trial << ',' << c.k << ',' << num(r.stats.alpha) << ',' << num(r.stats.beta) << ','
        << num(r.snr_db) << ',' << num(r.solve_mse) << ',' << num(r.oracle_mse) << ','
        << num(r.relative_gap) << ',' << r.l_star << ',' << r.l_star_interval << ','
        << (r.l_star == r.l_star_interval ? 1 : 0) << ',' << (r.oracle_budget_exhausted ? 1 : 0)
        << '\n';
    max_gap = std::max(max_gap, r.relative_gap);
    agree += r.l_star == r.l_star_interval ? 1 : 0;
    exhausted += r.oracle_budget_exhausted ? 1 : 0;
  }
  outputs.add("oracle_check.csv", csv.str());
  const bool passed = max_gap <= c.tolerance && agree == rows.size();
  outputs.add("oracle_check.json",
              canonical_dump(json{{"k", c.k},
                                  {"trials", c.trials},
                                  {"max_relative_gap", json_number(max_gap)},
                                  {"tolerance", c.tolerance},
                                  {"l_star_agreements", agree},
                                  {"oracle_budget_exhausted", exhausted},
                                  {"passed", passed}}));
  out << "oracle-check: k = " << c.k << ", trials = " << c.trials
      << ", max relative gap = " << num(max_gap) << ", l* agreement " << agree << "/"
      << rows.size() << "\n";
  if (!passed) {
    err << "oracle-check: failed (max relative gap " << num(max_gap) << ", tolerance "
        << num(c.tolerance) << ", l* agreement " << agree << "/" << rows.size() << ")\n";
  }
  return passed;
}

void append_trace_csv_header(std::ostream& csv, std::size_t device_count) {
  csv << "scheme,seed,t,alpha_hat,beta_hat,alpha_used,beta_used,true_alpha,true_beta,eta,l_star,"
         "mse_analytic,recovered_norm,train_loss,test_accuracy,beta_degenerate";
  for (std::size_t k = 1; k <= device_count; ++k) csv << ",p_" << k;
  csv << '\n';
}

void append_trace_csv(std::ostream& csv, const RoundTrace& r, std::uint64_t seed) {
  csv << to_string(r.scheme) << ',' << seed << ',' << r.t << ',' << num(r.alpha_hat) << ','
      << num(r.beta_hat) << ',' << num(r.alpha_used) << ',' << num(r.beta_used) << ','
      << num(r.true_alpha) << ',' << num(r.true_beta) << ',' << num(r.eta) << ',' << r.l_star
      << ',' << num(r.mse_analytic) << ',' << num(r.recovered_norm) << ',' << num(r.train_loss)
      << ',' << num(r.test_accuracy) << ',' << (r.beta_degenerate ? 1 : 0);
  for (double p : r.powers) csv << ',' << num(p);
  csv << '\n';
}

json trace_json(const RoundTrace& r, std::uint64_t seed) {
  json powers = json::array();
  for (double p : r.powers) powers.push_back(json_number(p));
  return {{"scheme", to_string(r.scheme)},
          {"seed", seed},
          {"t", r.t},
          {"alpha_hat", json_number(r.alpha_hat)},
          {"beta_hat", json_number(r.beta_hat)},
          {"alpha_used", json_number(r.alpha_used)},
          {"beta_used", json_number(r.beta_used)},
          {"true_alpha", json_number(r.true_alpha)},
          {"true_beta", json_number(r.true_beta)},
          {"eta", json_number(r.eta)},
          {"l_star", r.l_star},
          {"mse_analytic", json_number(r.mse_analytic)},
          {"recovered_norm", json_number(r.recovered_norm)},
          {"train_loss", json_number(r.train_loss)},
          {"test_accuracy", json_number(r.test_accuracy)},
          {"beta_degenerate", r.beta_degenerate},
          {"powers", powers}};
}

json outcome_json(const SchemeOutcome& o) {
  json per_seed = json::array();
  for (const auto& run : o.runs) {
    per_seed.push_back({{"seed", run.summary.seed},
                        {"final_accuracy", json_number(run.summary.final_accuracy)},
                        {"final_loss", json_number(run.summary.final_loss)}});
  }
  return {{"scheme", to_string(o.scheme)},
          {"median_accuracy", json_number(o.median_accuracy)},
          {"accuracy_q25", json_number(o.accuracy_q25)},
          {"accuracy_q75", json_number(o.accuracy_q75)},
          {"median_loss", json_number(o.median_loss)},
          {"runs", per_seed}};
}

void cmd_fl_run(const RunConfig& config, std::uint64_t seed, OutputSet& outputs,
                std::ostream& out) {
  const auto seeds = consecutive_seeds(seed, config.experiment.seeds);
  const auto outcomes = compare_schemes(config.train, config.experiment.schemes, seeds);

  std::ostringstream csv;
  std::ostringstream jsonl;
  append_trace_csv_header(csv, config.train.device_count);
  json summary = json::array();
  for (const auto& o : outcomes) {
    for (const auto& run : o.runs) {
      for (const auto& trace : run.traces) {
        append_trace_csv(csv, trace, run.summary.seed);
        jsonl << trace_json(trace, run.summary.seed).dump() << '\n';
      }
    }
    summary.push_back(outcome_json(o));
    out << "fl-run: " << to_string(o.scheme) << " median final accuracy "
        << num(o.median_accuracy) << ", median final loss " << num(o.median_loss) << "\n";
  }
  outputs.add("traces.csv", csv.str());
  outputs.add("traces.jsonl", jsonl.str());
  outputs.add("summary.json", canonical_dump(json{{"seeds", seeds.size()},
                                                  {"rounds", config.train.rounds},
                                                  {"schemes", summary}}));
}

void cmd_fig2_stats(const RunConfig& config, std::uint64_t seed, OutputSet& outputs,
                    std::ostream& out) {
  const auto seeds = consecutive_seeds(seed, config.experiment.seeds);
  const StatsTrajectory noniid =
      gradient_stats_trajectory(config.train, Partition::kNonIid, seeds);
  const StatsTrajectory iid = gradient_stats_trajectory(config.train, Partition::kIid, seeds);
  const TrajectoryShape shape =
      assess_trajectory_shape(noniid, iid, config.experiment.trend_blocks);

  std::ostringstream csv;
  csv << "partition,t,alpha_median,beta_median\n";
  for (const StatsTrajectory* tr : {&noniid, &iid}) {
    for (std::size_t i = 0; i < tr->alpha_median.size(); ++i) {
      csv << to_string(tr->partition) << ',' << i + 1 << ',' << num(tr->alpha_median[i]) << ','
          << num(tr->beta_median[i]) << '\n';
    }
  }
  outputs.add("fig2_stats.csv", csv.str());

  std::ostringstream blocks;
  blocks << "partition,block,alpha_mean,beta_mean\n";
  for (std::size_t b = 0; b < shape.noniid_alpha_blocks.size(); ++b) {
    blocks << "noniid," << b + 1 << ',' << num(shape.noniid_alpha_blocks[b]) << ','
           << num(shape.noniid_beta_blocks[b]) << '\n';
  }
  for (std::size_t b = 0; b < shape.iid_alpha_blocks.size(); ++b) {
    blocks << "iid," << b + 1 << ',' << num(shape.iid_alpha_blocks[b]) << ','
           << num(shape.iid_beta_blocks[b]) << '\n';
  }
  outputs.add("fig2_blocks.csv", blocks.str());
  outputs.add("fig2_summary.json",
              canonical_dump(json{{"seeds", seeds.size()},
                                  {"blocks", config.experiment.trend_blocks},
                                  {"alpha_decreasing", shape.alpha_decreasing},
                                  {"beta_increasing", shape.beta_increasing},
                                  {"noniid_beta_exceeds_iid", shape.noniid_beta_exceeds_iid}}));
  out << "fig2-stats: alpha decreasing " << shape.alpha_decreasing << ", beta increasing "
      << shape.beta_increasing << ", non-IID beta above IID " << shape.noniid_beta_exceeds_iid
      << "\n";
}

void write_sweep_outcomes(const std::string& key, const std::vector<double>& values,
                          const std::vector<std::vector<SchemeOutcome>>& results,
                          std::size_t seeds, const std::string& stem, OutputSet& outputs) {
  std::ostringstream csv;
  csv << key << ",scheme,median_accuracy,accuracy_q25,accuracy_q75,median_loss,seeds\n";
  json rows = json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    json schemes = json::array();
    for (const auto& o : results[i]) {
      csv << num(values[i]) << ',' << to_string(o.scheme) << ',' << num(o.median_accuracy) << ','
          << num(o.accuracy_q25) << ',' << num(o.accuracy_q75) << ',' << num(o.median_loss)
          << ',' << seeds << '\n';
      schemes.push_back(outcome_json(o));
    }
    rows.push_back({{key, values[i]}, {"schemes", schemes}});
  }
  outputs.add(stem + ".csv", csv.str());
  outputs.add(stem + ".json", canonical_dump(json{{"seeds", seeds}, {"points", rows}}));
}

void cmd_snr_sweep(const RunConfig& config, std::uint64_t seed, OutputSet& outputs,
                   std::ostream& out) {
  const auto seeds = consecutive_seeds(seed, config.experiment.seeds);
  std::vector<std::vector<SchemeOutcome>> results;
  for (double snr : config.experiment.snr_db_list) {
    TrainConfig train = config.train;
    train.snr_db = snr;
    results.push_back(compare_schemes(train, config.experiment.schemes, seeds));
    out << "snr-sweep: " << snr << " dB done\n";
  }
  write_sweep_outcomes("snr_db", config.experiment.snr_db_list, results, seeds.size(),
                       "snr_sweep", outputs);
}

void cmd_device_sweep(const RunConfig& config, std::uint64_t seed, OutputSet& outputs,
                      std::ostream& out) {
  const auto seeds = consecutive_seeds(seed, config.experiment.seeds);
  std::vector<std::vector<SchemeOutcome>> results;
  std::vector<double> counts;
  for (std::size_t k : config.experiment.device_counts) {
    TrainConfig train = config.train;
    train.device_count = k;
    results.push_back(compare_schemes(train, config.experiment.schemes, seeds));
    counts.push_back(static_cast<double>(k));
    out << "device-sweep: K = " << k << " done\n";
  }
  write_sweep_outcomes("device_count", counts, results, seeds.size(), "device_sweep", outputs);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Power control for over-the-air federated learning: optimizer sweeps, "
               "oracle checks and federated simulations.",
               "otafl"};
  std::string command;
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<std::size_t> trials;
  app.add_option("command", command, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "Strict JSON config (defaults apply when omitted)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Master seed (first of the seed range for multi-seed runs)");
  app.add_option("--k", k, "oracle-check: number of devices")->check(CLI::PositiveNumber);
  app.add_option("--trials", trials, "oracle-check: number of random instances")
      ->check(CLI::PositiveNumber);
  app.add_flag_function("--version", [&](std::int64_t) {
    out << "otafl " << kVersion << "\n";
    throw CLI::Success();
  }, "Print the version and exit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::Success&) {
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "otafl: " << e.what() << "\n";
    return kExitUsageError;
  }
  if ((k || trials) && command != "oracle-check") {
    err << "otafl: --k and --trials apply only to oracle-check\n";
    return kExitUsageError;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
  } catch (const std::exception& e) {
    err << "otafl: " << e.what() << "\n";
    return kExitUsageError;
  }
  if (k) config.oracle_check.k = *k;
  if (trials) config.oracle_check.trials = *trials;
  if (seed) config.train.master_seed = *seed;
  const std::uint64_t effective_seed = config.train.master_seed;

  try {
    OutputSet outputs(out_dir, command, effective_seed, to_json(config));
    bool passed = true;
    if (command == "sweep-beta") {
      cmd_sweep_beta(config, outputs, out);
    } else if (command == "solve-once") {
      cmd_solve_once(config, outputs, out);
    } else if (command == "oracle-check") {
      passed = cmd_oracle_check(config, effective_seed, outputs, out, err);
    } else if (command == "fl-run") {
      cmd_fl_run(config, effective_seed, outputs, out);
    } else if (command == "fig2-stats") {
      cmd_fig2_stats(config, effective_seed, outputs, out);
    } else if (command == "snr-sweep") {
      cmd_snr_sweep(config, effective_seed, outputs, out);
    } else if (command == "device-sweep") {
      cmd_device_sweep(config, effective_seed, outputs, out);
    }
    outputs.write(out);
    return passed ? kExitOk : kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "otafl " << command << ": " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace otafl
