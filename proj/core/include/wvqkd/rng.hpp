// Copyright 2026 The wvqkd Authors
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

// Seeded random streams.
//
// Work is split into fixed-size chunks of photon indices. Chunk k draws from
// an mt19937_64 seeded with stream_seed(seed, k), where
//
//   stream_seed(seed, k) = splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15)
//
// so the random numbers consumed by a photon depend only on (seed, index),
// never on how chunks are scheduled across threads.

#pragma once

#include <cstdint>
#include <random>

namespace wvqkd {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, n); n must be a power of two <= 2^32.
  int uniform_pow2(unsigned n) {
    return static_cast<int>((engine_() >> 32) & (static_cast<std::uint64_t>(n) - 1));
  }
  int coin() { return uniform_pow2(2); }
  double gaussian(double mean, double sd) { return mean + sd * normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace wvqkd
