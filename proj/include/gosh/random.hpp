// Copyright 2026 The gosh-cpu Authors
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
#include <initializer_list>

namespace gosh {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds a key tuple into one 64-bit seed. Used to give every
// (seed, level, epoch, vertex) its own stream.
inline constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> key) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t k : key) h = splitmix64(h ^ splitmix64(k));
  return h;
}

// Small counter-style generator (SplitMix64 stream). Cheap to construct, so a
// fresh one can be made per source vertex without touching shared state.
// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr Rng(std::initializer_list<std::uint64_t> key) noexcept : state_(derive_seed(key)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    if (bound <= 0xffffffffULL) {
      std::uint64_t x = (*this)() >> 32;
      std::uint64_t m = x * bound;
      std::uint32_t low = static_cast<std::uint32_t>(m);
      if (low < bound) {
        const std::uint32_t threshold = static_cast<std::uint32_t>(-static_cast<std::uint32_t>(bound)) %
                                        static_cast<std::uint32_t>(bound);
        while (low < threshold) {
          x = (*this)() >> 32;
          m = x * bound;
          low = static_cast<std::uint32_t>(m);
        }
      }
      return m >> 32;
    }
    // wide bounds: plain rejection on the top bits
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      const std::uint64_t x = (*this)() & mask;
      if (x < bound) return x;
    }
  }

  // Uniform double in [0, 1).
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace gosh
