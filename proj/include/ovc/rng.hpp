// Copyright 2026 The OVC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OVC_RNG_HPP_
#define OVC_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace ovc {

// Seeded generator with platform-independent distributions.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The standard distributions are implementation-defined, so the
// uniform, integer and normal draws are implemented here on top of the raw
// engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(Mix(seed)) {}

  // Independent stream derived from a base seed and a stream index.
  static Rng Stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(Mix(seed) ^ Mix(stream + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). Rejection sampling removes modulo bias.
  std::uint64_t Below(std::uint64_t n);

  // Uniform integer in [lo, hi] (inclusive).
  std::int64_t Between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    Below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal via Box-Muller; the spare value is cached.
  double Normal();

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  // First `count` entries of a uniformly random permutation of [0, n).
  std::vector<std::size_t> SampleWithoutReplacement(std::size_t n,
                                                    std::size_t count);

 private:
  static std::uint64_t Mix(std::uint64_t x);

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ovc

#endif  // OVC_RNG_HPP_
