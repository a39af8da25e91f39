// Copyright 2026 The ddph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded randomness shared by every module.
//
// The standard library's distributions are implementation-defined, so the
// conversions from raw 64-bit words to uniforms, bounded integers, normals and
// gamma variates are written out here. Given the same seed, every platform
// with an IEEE-754 libm produces the same stream.
//
// Seeds for independent streams are derived positionally:
//
//   DeriveSeed(master, {stream, a, b, ...})
//
// folds each path element into the state with SplitMix64, so the seed of
// (client 3, round 7) never depends on the order clients happen to run in.

#ifndef DDPH_RNG_HPP_
#define DDPH_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace ddph {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t DeriveSeed(uint64_t master,
                              std::initializer_list<uint64_t> path) {
  uint64_t state = SplitMix64(master);
  for (uint64_t element : path) state = SplitMix64(state ^ SplitMix64(element));
  return state;
}

// Tags separating the random streams used inside one federated run.
enum class Stream : uint64_t {
  kSplit = 1,
  kShard = 2,
  kLocalTrain = 3,
  kClientNoise = 4,
  kDropout = 5,
  kTopup = 6,
  kDefense = 7,
  kPoison = 8,
};

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1); safe as a log() argument.
  double UniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), rejection-sampled so it is unbiased.
  uint64_t Below(uint64_t bound);

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();

  // Gamma(shape, 1) via Marsaglia-Tsang.
  double Gamma(double shape);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ddph

#endif  // DDPH_RNG_HPP_
