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

#include "dca/random.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include "dca/error.h"

namespace dca {

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::UniformInt(std::uint64_t n) {
  if (n == 0) Fail(ErrorCode::kInvalidParameter, "UniformInt range is empty");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * Uniform() - 1.0;
    v = 2.0 * Uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

Matrix Rng::NormalMatrix(std::size_t rows, std::size_t cols, double stddev) {
  Matrix m(rows, cols);
  for (double& v : m.mutable_data()) v = stddev * Normal();
  return m;
}

Matrix Rng::UniformMatrix(std::size_t rows, std::size_t cols, double bound) {
  Matrix m(rows, cols);
  for (double& v : m.mutable_data()) v = Uniform(-bound, bound);
  return m;
}

std::string Rng::SaveState() const {
  std::ostringstream os;
  std::uint64_t spare_bits;
  std::memcpy(&spare_bits, &spare_, sizeof spare_bits);
  os << engine_ << ' ' << (has_spare_ ? 1 : 0) << ' ' << spare_bits;
  return os.str();
}

void Rng::LoadState(const std::string& state) {
  std::istringstream is(state);
  int has_spare = 0;
  std::uint64_t spare_bits = 0;
  is >> engine_ >> has_spare >> spare_bits;
  if (!is) Fail(ErrorCode::kFormat, "malformed RNG state");
  has_spare_ = has_spare != 0;
  std::memcpy(&spare_, &spare_bits, sizeof spare_);
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t tag) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace dca
