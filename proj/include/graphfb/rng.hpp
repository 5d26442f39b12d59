// Copyright 2026 The graphfb Authors.
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

#pragma once

#include <cstdint>

namespace graphfb {

// Counter-based generator built on the SplitMix64 finalizer.
//
// Stream contract (stable across releases, relied on by replay tests):
//   key(seed, stream) = mix(seed ^ mix(stream + kGolden))
//   bits(counter)     = mix(key + (counter + 1) * kGolden)
//   uniform(counter)  = ((bits >> 11) + 0.5) * 2^-53, always in (0, 1)
//   normal(counter)   = -sqrt(2) * erfc_inv(2 * uniform(counter))
// where mix is the SplitMix64 output function.
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Folds a list of words into a seed. Used for per-cell seed derivation:
// cell seed = derive_seed(master, T, index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0) {
  std::uint64_t h = splitmix64_mix(master + kGolden);
  h = splitmix64_mix(h ^ (a + kGolden));
  h = splitmix64_mix(h ^ (b + 2 * kGolden));
  return h;
}

class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64_mix(seed ^ splitmix64_mix(stream + kGolden))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64_mix(key_ + (counter + 1) * kGolden);
  }

  constexpr double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal by inverse CDF.
  double normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

// Sequential cursor over a CounterRng.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double uniform() { return rng_.uniform(counter_++); }
  double normal() { return rng_.normal(counter_++); }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t counter() const { return counter_; }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

// Named stream ids so independent consumers never share draws.
namespace streams {
inline constexpr std::uint64_t kMrwSign = 1;
inline constexpr std::uint64_t kMrwNoise = 2;
inline constexpr std::uint64_t kLearner = 3;
inline constexpr std::uint64_t kLazyQuery = 4;
inline constexpr std::uint64_t kBernoulliLosses = 5;
inline constexpr std::uint64_t kRandomGraph = 6;
inline constexpr std::uint64_t kMemoryProbe = 7;
}  // namespace streams

}  // namespace graphfb
