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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "otafl/gradient_stats.hpp"

namespace otafl {
namespace {

TEST(MomentsToStats, ZeroVarianceGivesZeroBeta) {
  const auto s = moments_to_stats(GradientMoments{{1.0, 0.0}, {0.0, 0.0}});
  EXPECT_DOUBLE_EQ(s.alpha, 1.0);
  EXPECT_DOUBLE_EQ(s.beta, 0.0);
}

TEST(MomentsToStats, ZeroMeanGivesInfiniteBeta) {
  const auto s = moments_to_stats(GradientMoments{{0.0, 0.0}, {2.0, 3.0}});
  EXPECT_DOUBLE_EQ(s.alpha, 5.0);
  EXPECT_TRUE(s.beta_is_infinite());
}

TEST(MomentsToStats, DirectEvaluation) {
  const auto s = moments_to_stats(GradientMoments{{1.0, 1.0}, {1.0, 1.0}});
  EXPECT_DOUBLE_EQ(s.alpha, 4.0);
  EXPECT_DOUBLE_EQ(s.beta, 1.0);
}

TEST(MomentsToStats, RejectsDegenerateInput) {
  EXPECT_THROW(moments_to_stats(GradientMoments{{0.0}, {0.0}}), std::domain_error);
  EXPECT_THROW(moments_to_stats(GradientMoments{{1.0}, {-1.0}}), std::invalid_argument);
  EXPECT_THROW(moments_to_stats(GradientMoments{{1.0, 2.0}, {1.0}}), std::invalid_argument);
}

TEST(EstimateAlpha, ExamplesAndErrors) {
  const std::vector<double> constant{2.0, 2.0, 2.0};
  EXPECT_DOUBLE_EQ(estimate_alpha(constant), 4.0);
  const std::vector<double> ramp{1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(estimate_alpha(ramp), 14.0 / 3.0);
  EXPECT_THROW(estimate_alpha(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(estimate_alpha(std::vector<double>{-1.0}), std::invalid_argument);
}

TEST(EstimateBeta, ExamplesBoundaryAndSentinel) {
  const std::vector<double> g{1.0, 1.0};  // squared norm 2
  EXPECT_DOUBLE_EQ(estimate_beta(10.0, g), 4.0);
  const std::vector<double> g4{2.0, 0.0};  // squared norm 4
  EXPECT_DOUBLE_EQ(estimate_beta(4.0, g4), 0.0);
  EXPECT_DOUBLE_EQ(estimate_beta(1.0, g4), 0.0);  // negative raw value clamps to zero
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_TRUE(std::isinf(estimate_beta(3.0, zero)));
  EXPECT_THROW(estimate_beta(0.0, g), std::invalid_argument);
}

TEST(SampleGradients, ZeroVarianceReturnsTheMean) {
  const GradientMoments m{{1.5, -2.0, 0.0}, {0.0, 0.0, 0.0}};
  const auto draws = sample_gradients(m, 4, 9);
  ASSERT_EQ(draws.size(), 4u);
  for (const auto& g : draws) EXPECT_EQ(g, m.means);
}

TEST(SampleGradients, Reproducible) {
  const GradientMoments m{{1.0, 2.0}, {0.5, 3.0}};
  EXPECT_EQ(sample_gradients(m, 5, 21), sample_gradients(m, 5, 21));
  EXPECT_NE(sample_gradients(m, 5, 21), sample_gradients(m, 5, 22));
}

TEST(SampleGradients, MomentsMatchWithinThreeStandardErrors) {
  const GradientMoments m{{0.7, -1.3}, {0.4, 2.5}};
  const std::size_t n = 100000;
  const auto draws = sample_gradients(m, n, 3);
  const GradientMoments e = empirical_moments(draws);
  for (std::size_t d = 0; d < 2; ++d) {
    const double se_mean = std::sqrt(m.variances[d] / n);
    const double se_var = m.variances[d] * std::sqrt(2.0 / (n - 1));
    EXPECT_NEAR(e.means[d], m.means[d], 3.0 * se_mean);
    EXPECT_NEAR(e.variances[d], m.variances[d], 3.0 * se_var);
  }
}

TEST(EmpiricalMoments, UnbiasedVariance) {
  const std::vector<std::vector<double>> samples{{1.0}, {3.0}};
  const auto e = empirical_moments(samples);
  EXPECT_DOUBLE_EQ(e.means[0], 2.0);
  EXPECT_DOUBLE_EQ(e.variances[0], 2.0);
}

}  // namespace
}  // namespace otafl
