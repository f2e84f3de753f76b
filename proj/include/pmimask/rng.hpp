// Copyright 2026 The pmimask Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace pmimask {

// Independent random streams derived from one (seed, doc_id) pair. Each
// consumer draws from its own stream so adding a strategy never perturbs the
// others.
enum class Stream : std::uint64_t {
  kCandidates = 1,
  kCorruption = 2,
  kApproximate = 3,
  kRandom = 4,
  kSpan = 5,
  kPmiSpan = 6,
};

constexpr std::uint64_t SplitMix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-document seed: a pure function of (global seed, doc id, stream), so
/// serial and sharded runs draw identical randomness for each document.
constexpr std::uint64_t DeriveSeed(std::uint64_t global_seed, std::uint64_t doc_id,
                                   Stream stream, std::uint64_t epoch = 0) noexcept {
  std::uint64_t h = SplitMix64(global_seed);
  h = SplitMix64(h ^ doc_id);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(stream));
  return SplitMix64(h ^ epoch);
}

// mt19937_64's output sequence is fixed by the standard; the distributions in
// <random> are not, so the draws below are implemented here to keep output
// files identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t Below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pmimask
