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

#include "otafl/synthetic_task.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace otafl {

namespace {

void fill_split(Dataset& out, std::size_t count, const std::vector<double>& means,
                const std::vector<double>& scales, std::size_t classes, std::size_t features,
                Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  out.features = features;
  out.x.resize(count * features);
  out.y.resize(count);
  for (std::size_t i = 0; i < count; ++i) out.y[i] = static_cast<int>(i % classes);
  std::shuffle(out.y.begin(), out.y.end(), engine);
  for (std::size_t i = 0; i < count; ++i) {
    const double* mu = means.data() + static_cast<std::size_t>(out.y[i]) * features;
    for (std::size_t j = 0; j < features; ++j) out.x[i * features + j] = scales[j] * (mu[j] + normal(engine));
  }
}

// Softmax probabilities of one sample, written to `prob`.
void softmax_row(const SyntheticTask& task, std::span<const double> model,
                 std::span<const double> xrow, std::vector<double>& prob) {
  const std::size_t f = task.features;
  double max_logit = -INFINITY;
  for (std::size_t c = 0; c < task.num_classes; ++c) {
    const double* w = model.data() + c * (f + 1);
    double z = w[f];
    for (std::size_t j = 0; j < f; ++j) z += w[j] * xrow[j];
    prob[c] = z;
    max_logit = std::max(max_logit, z);
  }
  double total = 0.0;
  for (std::size_t c = 0; c < task.num_classes; ++c) {
    prob[c] = std::exp(prob[c] - max_logit);
    total += prob[c];
  }
  for (std::size_t c = 0; c < task.num_classes; ++c) prob[c] /= total;
}

void check_model(const SyntheticTask& task, std::span<const double> model) {
  if (model.size() != task.dimension()) throw std::invalid_argument("model has wrong dimension");
}

}  // namespace

SyntheticTask make_synthetic_task(const TaskSpec& spec, std::uint64_t seed) {
  if (spec.num_classes < 2) throw std::invalid_argument("synthetic task: need at least two classes");
  if (spec.dimension % spec.num_classes != 0 || spec.dimension / spec.num_classes < 2) {
    throw std::invalid_argument("synthetic task: dimension must be classes * (features + 1)");
  }
  if (!(spec.feature_scale_min > 0.0 && spec.feature_scale_min <= 1.0)) {
    throw std::invalid_argument("synthetic task: feature_scale_min must lie in (0, 1]");
  }
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw std::invalid_argument("synthetic task: test_fraction must lie in (0, 1)");
  }
  const std::size_t test_count =
      static_cast<std::size_t>(std::llround(spec.test_fraction * spec.num_samples));
  if (test_count < spec.num_classes || spec.num_samples - test_count < spec.num_classes) {
    throw std::invalid_argument("synthetic task: too few samples");
  }
  SyntheticTask task;
  task.num_classes = spec.num_classes;
  task.features = spec.dimension / spec.num_classes - 1;

  Engine engine = make_engine(seed, 0, Stream::kDataset);
  std::normal_distribution<double> centre(0.0, spec.class_separation);
  std::vector<double> means(task.num_classes * task.features);
  for (double& m : means) m = centre(engine);
  std::vector<double> scales(task.features, 1.0);
  for (std::size_t j = 1; j < task.features; ++j) {
    scales[j] = std::pow(spec.feature_scale_min,
                         static_cast<double>(j) / static_cast<double>(task.features - 1));
  }
  fill_split(task.train, spec.num_samples - test_count, means, scales, task.num_classes,
             task.features, engine);
  fill_split(task.test, test_count, means, scales, task.num_classes, task.features, engine);
  return task;
}

std::vector<std::vector<std::size_t>> partition_data(const Dataset& train, std::size_t device_count,
                                                     Partition mode, std::uint64_t seed) {
  if (device_count == 0) throw std::invalid_argument("partition_data: no devices");
  const std::size_t shard_count = mode == Partition::kIid ? device_count : 2 * device_count;
  if (train.size() < shard_count) {
    throw std::invalid_argument("partition_data: too few samples for the requested shards");
  }
  Engine engine = make_engine(seed, 0, Stream::kPartition);
  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), engine);
  if (mode == Partition::kNonIid) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return train.y[a] < train.y[b]; });
  }
  // Near-equal contiguous shards.
  std::vector<std::vector<std::size_t>> shards(shard_count);
  const std::size_t base = train.size() / shard_count;
  const std::size_t extra = train.size() % shard_count;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < shard_count; ++s) {
    const std::size_t len = base + (s < extra ? 1 : 0);
    shards[s].assign(idx.begin() + pos, idx.begin() + pos + len);
    pos += len;
  }
  if (mode == Partition::kIid) return shards;

  std::vector<std::size_t> assignment(shard_count);
  std::iota(assignment.begin(), assignment.end(), std::size_t{0});
  std::shuffle(assignment.begin(), assignment.end(), engine);
  std::vector<std::vector<std::size_t>> devices(device_count);
  for (std::size_t k = 0; k < device_count; ++k) {
    for (std::size_t s : {assignment[2 * k], assignment[2 * k + 1]}) {
      devices[k].insert(devices[k].end(), shards[s].begin(), shards[s].end());
    }
  }
  return devices;
}

std::vector<double> batch_gradient(const SyntheticTask& task, std::span<const double> model,
                                   const Dataset& data, std::span<const std::size_t> indices) {
  check_model(task, model);
  if (indices.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  const std::size_t f = task.features;
  std::vector<double> grad(task.dimension(), 0.0);
  std::vector<double> prob(task.num_classes);
  for (std::size_t i : indices) {
    const auto xrow = data.row(i);
    softmax_row(task, model, xrow, prob);
    prob[static_cast<std::size_t>(data.y[i])] -= 1.0;
    for (std::size_t c = 0; c < task.num_classes; ++c) {
      double* g = grad.data() + c * (f + 1);
      const double r = prob[c];
      for (std::size_t j = 0; j < f; ++j) g[j] += r * xrow[j];
      g[f] += r;
    }
  }
  const double inv = 1.0 / static_cast<double>(indices.size());
  for (double& v : grad) v *= inv;
  return grad;
}

LocalGradient local_sgd_gradient(const SyntheticTask& task, std::span<const double> model,
                                 std::span<const std::size_t> shard, std::size_t batch_size,
                                 Engine& engine) {
  if (shard.empty()) throw std::invalid_argument("local_sgd_gradient: empty shard");
  if (batch_size == 0) throw std::invalid_argument("local_sgd_gradient: batch size must be >= 1");
  std::vector<std::size_t> batch;
  if (batch_size >= shard.size()) {
    batch.assign(shard.begin(), shard.end());
  } else {
    batch.resize(batch_size);
    std::sample(shard.begin(), shard.end(), batch.begin(), batch_size, engine);
  }
  LocalGradient out;
  out.gradient = batch_gradient(task, model, task.train, batch);
  double sq = 0.0;
  for (double v : out.gradient) sq += v * v;
  out.norm = std::sqrt(sq);
  return out;
}

double mean_loss(const SyntheticTask& task, std::span<const double> model, const Dataset& data) {
  check_model(task, model);
  std::vector<double> prob(task.num_classes);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    softmax_row(task, model, data.row(i), prob);
    total -= std::log(std::max(prob[static_cast<std::size_t>(data.y[i])], 1e-300));
  }
  return total / static_cast<double>(data.size());
}

double accuracy(const SyntheticTask& task, std::span<const double> model, const Dataset& data) {
  check_model(task, model);
  std::vector<double> prob(task.num_classes);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    softmax_row(task, model, data.row(i), prob);
    const auto best = std::max_element(prob.begin(), prob.end()) - prob.begin();
    if (best == data.y[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace otafl
