/*
 * Copyright 2026 The CRNN Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace crnn {

// Seeded generator that derives independent named streams, so one user seed
// drives every random decision (initialization, shuffling, synthetic data).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  // Child stream keyed by name; independent of how much this stream has
  // already been consumed.
  Rng split(std::string_view name) const;

  std::uint64_t seed() const { return seed_; }
  double uniform(double lo, double hi);
  std::size_t index(std::size_t n);
  std::vector<double> uniform_vector(std::size_t n, double lo, double hi);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    // Fisher-Yates on our own index() so results do not depend on the
    // standard library's shuffle implementation.
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace crnn
