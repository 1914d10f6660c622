// Copyright (c) 2026 DCA Verification Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DCA_RANDOM_H_
#define DCA_RANDOM_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dca/matrix.h"

namespace dca {

// Seeded generator with platform-independent derived distributions:
// uniforms come straight from the 64-bit Mersenne Twister output and
// normals from the Marsaglia polar method, so a seed fixes every draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[UniformInt(i)]);
    }
  }

  Matrix NormalMatrix(std::size_t rows, std::size_t cols, double stddev = 1.0);
  Matrix UniformMatrix(std::size_t rows, std::size_t cols, double bound);

  // Text snapshot of the full generator state, including a cached normal.
  std::string SaveState() const;
  void LoadState(const std::string& state);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent stream seed from a base seed and a tag.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t tag);

}  // namespace dca

#endif  // DCA_RANDOM_H_
