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

#ifndef OTAFL_RNG_HPP_
#define OTAFL_RNG_HPP_

#include <cstdint>
#include <random>

namespace otafl {

// Every random draw in the library comes from an engine keyed by
// (master seed, iteration, purpose, sub-index), so that channel draws, noise,
// data shuffles and mini-batches are reproducible independently of each other.
enum class Stream : std::uint64_t {
  kChannel = 1,
  kNoise = 2,
  kGradient = 3,
  kMiniBatch = 4,
  kPartition = 5,
  kDataset = 6,
  kTrueStats = 7,
  kOracle = 8,
  kTrial = 9,
};

using Engine = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t iteration,
                                    Stream purpose, std::uint64_t sub_index = 0) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ iteration);
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  return mix64(h ^ sub_index);
}

inline Engine engine_from_key(std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return Engine(seq);
}

inline Engine make_engine(std::uint64_t master, std::uint64_t iteration, Stream purpose,
                          std::uint64_t sub_index = 0) {
  return engine_from_key(derive_seed(master, iteration, purpose, sub_index));
}

inline Engine make_engine(std::uint64_t seed) { return engine_from_key(mix64(seed)); }

}  // namespace otafl

#endif  // OTAFL_RNG_HPP_
