// Copyright 2026 The kconflict Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KCONFLICT_RNG_H_
#define KCONFLICT_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace kconflict {

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view bytes);

uint64_t SplitMix64(uint64_t x);

// Effective seed of one randomized operation on one question:
//   SplitMix64(SplitMix64(global_seed ^ Fnv1a64(qid)) ^ Fnv1a64(op))
// Parallel or reordered execution cannot change any draw.
uint64_t DeriveSeed(uint64_t global_seed, std::string_view qid,
                    std::string_view op);

// Portable RNG over std::mt19937_64 with its own distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, n). n must be > 0.
  size_t UniformIndex(size_t n);

  // Uniform in [0, 1) with 53 bits of precision.
  double UniformReal();

  // k distinct indices of [0, n) in draw order (partial Fisher-Yates).
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[UniformIndex(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kconflict

#endif  // KCONFLICT_RNG_H_
