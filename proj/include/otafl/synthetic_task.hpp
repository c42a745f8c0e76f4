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

#ifndef OTAFL_SYNTHETIC_TASK_HPP_
#define OTAFL_SYNTHETIC_TASK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otafl/rng.hpp"

namespace otafl {

struct TaskSpec {
  std::size_t num_samples = 5000;
  std::size_t num_classes = 10;
  std::size_t dimension = 500;      // model size D = classes * (features + 1)
  double test_fraction = 0.2;
  double class_separation = 0.5;    // std-dev of each class-mean coordinate
  double feature_scale_min = 0.05;  // feature j is scaled by min^(j / (F - 1))
};

struct Dataset {
  std::size_t features = 0;
  std::vector<double> x;  // row-major, size() x features
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * features, features}; }
};

// Labelled Gaussian mixture, balanced over classes in both splits, with a
// softmax-regression model whose weights and biases form a D-vector laid out
// class by class as [w_c (features), b_c].
struct SyntheticTask {
  std::size_t num_classes = 0;
  std::size_t features = 0;
  Dataset train;
  Dataset test;

  std::size_t dimension() const { return num_classes * (features + 1); }
};

SyntheticTask make_synthetic_task(const TaskSpec& spec, std::uint64_t seed);

enum class Partition { kIid, kNonIid };

// kIid: shuffled, split into K near-equal shards. kNonIid: sorted by label,
// split into 2K near-equal shards, two random shards per device. Shards are
// disjoint and cover the whole training set.
std::vector<std::vector<std::size_t>> partition_data(const Dataset& train, std::size_t device_count,
                                                     Partition mode, std::uint64_t seed);

// Mean cross-entropy gradient over the given sample indices.
std::vector<double> batch_gradient(const SyntheticTask& task, std::span<const double> model,
                                   const Dataset& data, std::span<const std::size_t> indices);

struct LocalGradient {
  std::vector<double> gradient;
  double norm = 0.0;
};

// One mini-batch drawn without replacement from the shard (the whole shard if
// it is not larger than the batch).
LocalGradient local_sgd_gradient(const SyntheticTask& task, std::span<const double> model,
                                 std::span<const std::size_t> shard, std::size_t batch_size,
                                 Engine& engine);

double mean_loss(const SyntheticTask& task, std::span<const double> model, const Dataset& data);
double accuracy(const SyntheticTask& task, std::span<const double> model, const Dataset& data);

}  // namespace otafl

#endif  // OTAFL_SYNTHETIC_TASK_HPP_
