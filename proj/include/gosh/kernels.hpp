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
#include <span>

#include "gosh/embedding.hpp"

namespace gosh {

inline constexpr double kSigmoidClamp = 10.0;

// Logistic function with the input clamped to [-10, 10].
template <typename T>
inline T sigmoid(T x) noexcept {
  const T c = static_cast<T>(kSigmoidClamp);
  x = std::clamp(x, -c, c);
  return T(1) / (T(1) + std::exp(-x));
}

enum class UpdateRule {
  // Sample row is moved with the source row as it was before this update,
  // which makes each call one exact gradient step on both rows.
  kSnapshot,
  // Sample row is moved with the already-updated source row.
  kGaussSeidel,
};

// One noise-contrastive step on a (source, sample) pair with label b (1 for a
// positive sample, 0 for noise). score = (b - sigmoid(src . smp)) * lr;
// src += smp * score; smp += src_old * score. Returns score. The two spans
// may alias the same row.
template <typename T>
inline T nce_update(std::span<T> src, std::span<T> smp, T label, T lr,
                    UpdateRule rule = UpdateRule::kSnapshot) noexcept {
  const std::size_t d = src.size();
  T* __restrict__ a = src.data();
  T* b = smp.data();
  // eight independent partial sums so the reduction vectorizes without
  // reassociation flags
  T acc[8] = {};
  std::size_t j = 0;
  for (; j + 8 <= d; j += 8)
    for (std::size_t l = 0; l < 8; ++l) acc[l] += a[j + l] * b[j + l];
  T dot = ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
  for (; j < d; ++j) dot += a[j] * b[j];
  const T score = (label - sigmoid(dot)) * lr;
  if (a == b) {
    const T factor = rule == UpdateRule::kSnapshot ? T(1) + T(2) * score : (T(1) + score) * (T(1) + score);
    for (std::size_t j = 0; j < d; ++j) a[j] *= factor;
    return score;
  }
  T* __restrict__ bb = b;
  if (rule == UpdateRule::kSnapshot) {
    for (std::size_t j = 0; j < d; ++j) {
      const T old = a[j];
      a[j] += bb[j] * score;
      bb[j] += old * score;
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      a[j] += bb[j] * score;
      bb[j] += a[j] * score;
    }
  }
  return score;
}

inline float update_embedding(EmbeddingMatrix& m, vertex_id v, vertex_id s, int b, float lr,
                              UpdateRule rule = UpdateRule::kSnapshot) noexcept {
  return nce_update<float>(m.row(v), m.row(s), static_cast<float>(b), lr, rule);
}

}  // namespace gosh
