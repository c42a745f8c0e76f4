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

#include <stdexcept>
#include <vector>

#include "otafl/experiments.hpp"

namespace otafl {
namespace {

TEST(Quantile, InterpolatesBetweenRanks) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_DOUBLE_EQ(quantile({0.0, 10.0}, 0.25), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
  EXPECT_THROW(quantile({1.0}, 1.5), std::invalid_argument);
}

TEST(BlockMeans, SplitsNearEqually) {
  const std::vector<double> s{1, 2, 3, 4, 5, 6, 7};
  const auto b = block_means(s, 3);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_DOUBLE_EQ(b[0], 1.5);
  EXPECT_DOUBLE_EQ(b[1], 3.5);
  EXPECT_DOUBLE_EQ(b[2], 6.0);
  EXPECT_THROW(block_means(s, 0), std::invalid_argument);
  EXPECT_THROW(block_means(s, 8), std::invalid_argument);
}

TEST(Monotone, StrictChecks) {
  EXPECT_TRUE(strictly_increasing(std::vector<double>{1, 2, 3}));
  EXPECT_FALSE(strictly_increasing(std::vector<double>{1, 2, 2}));
  EXPECT_TRUE(strictly_decreasing(std::vector<double>{3, 2, 1}));
  EXPECT_FALSE(strictly_decreasing(std::vector<double>{3, 3}));
}

TEST(ConsecutiveSeeds, Range) {
  EXPECT_EQ(consecutive_seeds(5, 3), (std::vector<std::uint64_t>{5, 6, 7}));
}

TEST(RunOracleCheck, SmallSuitePassesAndIsReproducible) {
  OracleCheckOptions o;
  o.device_count = 2;
  o.trials = 5;
  o.oracle.restarts = 8;
  const auto a = run_oracle_check(o);
  const auto b = run_oracle_check(o, Execution::kSerial);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LE(a[i].relative_gap, 1e-6);
    EXPECT_EQ(a[i].l_star, a[i].l_star_interval);
    EXPECT_EQ(a[i].stats.beta, b[i].stats.beta);
    EXPECT_EQ(a[i].oracle_mse, b[i].oracle_mse);
    EXPECT_GE(a[i].stats.beta, 0.01);
    EXPECT_LE(a[i].stats.beta, 100.0);
    EXPECT_GE(a[i].snr_db, 0.0);
    EXPECT_LE(a[i].snr_db, 20.0);
  }
}

TEST(TrajectoryShape, DetectsTrends) {
  StatsTrajectory noniid{Partition::kNonIid, {5, 4, 3, 2}, {2, 3, 4, 5}};
  StatsTrajectory iid{Partition::kIid, {2, 1.5, 1, 0.5}, {1, 1.5, 2, 2.5}};
  const auto shape = assess_trajectory_shape(noniid, iid, 2);
  EXPECT_TRUE(shape.alpha_decreasing);
  EXPECT_TRUE(shape.beta_increasing);
  EXPECT_TRUE(shape.noniid_beta_exceeds_iid);
  iid.beta_median = {3, 3, 1, 1};
  const auto flipped = assess_trajectory_shape(noniid, iid, 2);
  EXPECT_FALSE(flipped.beta_increasing);
  EXPECT_FALSE(flipped.noniid_beta_exceeds_iid);
}

}  // namespace
}  // namespace otafl
