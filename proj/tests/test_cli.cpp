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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "otafl/cli.hpp"

namespace otafl {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("otafl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  std::string write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, SweepBetaWritesSchemaAndManifest) {
  const fs::path out = dir_ / "sweep";
  ASSERT_EQ(run({"sweep-beta", "--out", out.string()}), kExitOk) << err_.str();
  const std::string csv = read(out / "sweep_beta_snr10dB.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "beta,l_star,p_1,p_2,p_3,p_4,p_5,p_6,eta,mse_total");
  EXPECT_TRUE(fs::exists(out / "sweep_beta_snr5dB.csv"));
  const auto manifest = nlohmann::json::parse(read(out / "manifest.json"));
  EXPECT_EQ(manifest["schema_version"], kManifestSchemaVersion);
  EXPECT_EQ(manifest["command"], "sweep-beta");
  EXPECT_EQ(manifest["config"]["train"]["device_count"], 10);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
  EXPECT_EQ(manifest["outputs"].size(), 3u);
}

TEST_F(CliTest, SolveOnceSingleDeviceTransmitsAtPeak) {
  const std::string cfg = write_config(
      "k1.json", R"({"optimizer": {"channel_magnitudes": [0.7], "peak_power": 3.0}})");
  const fs::path out = dir_ / "solve";
  ASSERT_EQ(run({"solve-once", "--config", cfg, "--out", out.string()}), kExitOk) << err_.str();
  std::istringstream csv(read(out / "solve_once.csv"));
  std::string header, row, extra;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_FALSE(std::getline(csv, extra));
  EXPECT_EQ(header, "beta,l_star,p_1,eta,mse_total");
  EXPECT_EQ(row.substr(0, 6), "1,1,3,");
}

TEST_F(CliTest, OracleCheckReportsGap) {
  const fs::path out = dir_ / "oracle";
  ASSERT_EQ(run({"oracle-check", "--k", "2", "--trials", "4", "--out", out.string()}), kExitOk)
      << err_.str();
  const auto report = nlohmann::json::parse(read(out / "oracle_check.json"));
  EXPECT_EQ(report["k"], 2);
  EXPECT_EQ(report["trials"], 4);
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_LE(report["max_relative_gap"].get<double>(), 1e-6);
}

TEST_F(CliTest, ReRunIsByteIdentical) {
  const std::string cfg = write_config("fl.json", R"({
    "train": {"device_count": 3, "num_classes": 3, "dimension": 27, "num_samples": 300,
              "rounds": 4, "batch_size": 8},
    "experiment": {"seeds": 2, "schemes": ["adaptive", "error_free"]}
  })");
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  ASSERT_EQ(run({"fl-run", "--config", cfg, "--out", a.string(), "--seed", "9"}), kExitOk)
      << err_.str();
  ASSERT_EQ(run({"fl-run", "--config", cfg, "--out", b.string(), "--seed", "9"}), kExitOk);
  for (const char* f : {"traces.csv", "traces.jsonl", "summary.json", "manifest.json"}) {
    EXPECT_EQ(read(a / f), read(b / f)) << f;
  }
  const auto manifest = nlohmann::json::parse(read(a / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 9);
  EXPECT_EQ(manifest["config"]["train"]["master_seed"], 9);
  std::istringstream jsonl(read(a / "traces.jsonl"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(jsonl, line)) {
    ++lines;
    EXPECT_NO_THROW(nlohmann::json::parse(line));
  }
  EXPECT_EQ(lines, 2u * 2u * 4u);
}

TEST_F(CliTest, BadConfigNamesTheKey) {
  const std::string cfg = write_config("bad.json", R"({"train": {"snr_dB": 5}})");
  EXPECT_EQ(run({"fl-run", "--config", cfg, "--out", (dir_ / "x").string()}), kExitUsageError);
  EXPECT_NE(err_.str().find("train.snr_dB"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), kExitUsageError);
  EXPECT_EQ(run({"train-everything"}), kExitUsageError);
  EXPECT_EQ(run({"fl-run", "--k", "3"}), kExitUsageError);
  EXPECT_EQ(run({"solve-once", "--config", (dir_ / "missing.json").string()}), kExitUsageError);
  EXPECT_EQ(run({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("--config"), std::string::npos);
}

TEST_F(CliTest, SimulationErrorsCarryRoundContext) {
  // Zero noise makes the peak power zero, so the optimizer has no usable channel.
  const std::string cfg = write_config("zero.json", R"({
    "train": {"device_count": 3, "num_classes": 3, "dimension": 27, "num_samples": 300,
              "rounds": 2, "noise_variance": 0},
    "experiment": {"seeds": 1, "schemes": ["adaptive"]}
  })");
  EXPECT_EQ(run({"fl-run", "--config", cfg, "--out", (dir_ / "z").string()}), kExitRuntimeError);
  EXPECT_NE(err_.str().find("round 1"), std::string::npos) << err_.str();
}

}  // namespace
}  // namespace otafl
