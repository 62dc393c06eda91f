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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "gosh/error.hpp"

namespace gosh {

struct EpochPlan {
  std::vector<std::size_t> per_level;  // e_0 .. e_{D-1}; level D-1 is coarsest
  // Unrounded components: uniform p*e/D and geometric (1-p)*e*2^i/(2^D-1).
  std::vector<double> uniform_share;
  std::vector<double> geometric_share;

  std::size_t total() const noexcept { return std::accumulate(per_level.begin(), per_level.end(), std::size_t{0}); }
};

// Splits `total_epochs` over `depth` levels: a `smoothing` share uniformly and
// the rest geometrically, each coarser level getting twice the previous one.
// Shares are rounded by largest remainder so the total is exact; every level
// gets at least one epoch, taken from the largest entry.
inline EpochPlan epoch_plan(std::size_t total_epochs, double smoothing, std::size_t depth) {
  if (depth == 0) throw plan_error("epoch plan needs at least one level");
  if (total_epochs < depth) throw plan_error("fewer epochs than coarsening levels");
  if (!(smoothing >= 0.0 && smoothing <= 1.0)) throw config_error("smoothing ratio must be in [0, 1]");

  EpochPlan plan;
  const double e = static_cast<double>(total_epochs);
  const double uniform = smoothing * e / static_cast<double>(depth);
  const double denom = std::ldexp(1.0, static_cast<int>(depth)) - 1.0;
  // largest-remainder rounding; ties go to the coarser level so the plan
  // stays nondecreasing in i
  std::vector<long long> rounded(depth);
  std::vector<double> remainder(depth);
  long long assigned = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    const double geo = (1.0 - smoothing) * e * std::ldexp(1.0, static_cast<int>(i)) / denom;
    plan.uniform_share.push_back(uniform);
    plan.geometric_share.push_back(geo);
    const double x = uniform + geo;
    rounded[i] = static_cast<long long>(std::floor(x));
    remainder[i] = x - std::floor(x);
    assigned += rounded[i];
  }
  std::vector<std::size_t> by_remainder(depth);
  std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
  std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b] || (remainder[a] == remainder[b] && a > b);
  });
  // float error can leave the floors a step away from e in either direction
  for (std::size_t j = 0; assigned < static_cast<long long>(total_epochs); j = (j + 1) % depth, ++assigned)
    ++rounded[by_remainder[j]];
  for (std::size_t j = depth; assigned > static_cast<long long>(total_epochs); --assigned) {
    j = j == 0 ? depth - 1 : j - 1;
    --rounded[by_remainder[j]];
  }
  // levels left at zero borrow from the first largest entry
  for (std::size_t i = 0; i < depth; ++i) {
    while (rounded[i] < 1) {
      auto big = std::max_element(rounded.begin(), rounded.end());
      --*big;
      ++rounded[i];
    }
  }
  plan.per_level.assign(rounded.begin(), rounded.end());
  return plan;
}

inline constexpr double kLearningRateFloor = 1e-4;

// Learning rate for epoch j of a level trained for e_i epochs.
inline double lr_at(double lr0, std::size_t epoch, std::size_t level_epochs) noexcept {
  if (level_epochs == 0) return lr0;
  const double frac = 1.0 - static_cast<double>(epoch) / static_cast<double>(level_epochs);
  return lr0 * std::max(frac, kLearningRateFloor);
}

}  // namespace gosh
