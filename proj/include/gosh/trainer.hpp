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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gosh/coarsen.hpp"
#include "gosh/config.hpp"
#include "gosh/embedding.hpp"
#include "gosh/graph.hpp"
#include "gosh/kernels.hpp"
#include "gosh/parallel.hpp"
#include "gosh/random.hpp"
#include "gosh/schedule.hpp"

namespace gosh {

struct UpdateCounters {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;

  UpdateCounters& operator+=(const UpdateCounters& o) noexcept {
    positive += o.positive;
    negative += o.negative;
    return *this;
  }
  friend bool operator==(const UpdateCounters&, const UpdateCounters&) = default;
};

inline std::size_t passes_per_epoch(const Graph& g, EpochUnit unit) noexcept {
  if (unit == EpochUnit::kVertexPass || g.empty()) return 1;
  const std::size_t v = g.num_vertices();
  return std::max<std::size_t>(1, (g.num_arcs() + v - 1) / v);
}

inline constexpr std::size_t kTrainBatch = 256;

// Sampling stream for one source vertex in one pass.
inline Rng source_stream(std::uint64_t seed, std::size_t level, std::size_t pass, vertex_id v) noexcept {
  return Rng{seed, 0x7a11u, level, pass, v};
}

// Trains `m` in place on `g` for `level_epochs` epochs. Each pass visits every
// non-isolated source once: one positive sample from its neighbors, then
// `negative_samples` uniform noise vertices. Passes are separated by a full
// join. Sources are never processed concurrently, but two workers may touch
// the same sample row at once; those races are tolerated.
inline UpdateCounters train_level(const Graph& g, EmbeddingMatrix& m, const TrainConfig& cfg,
                                  std::size_t level_epochs, double lr0, std::size_t level = 0) {
  if (m.rows() != g.num_vertices()) throw dimension_error("embedding rows do not match graph vertices");
  const vertex_id n = g.num_vertices();
  const std::size_t passes = passes_per_epoch(g, cfg.epoch_unit);
  const unsigned workers = resolve_workers(cfg.num_workers);
  std::vector<UpdateCounters> per_worker(workers);

  for (std::size_t epoch = 0; epoch < level_epochs; ++epoch) {
    const float lr = static_cast<float>(lr_at(lr0, epoch, level_epochs));
    for (std::size_t pass = 0; pass < passes; ++pass) {
      const std::size_t pass_id = epoch * passes + pass;
      parallel_for_dynamic(n, kTrainBatch, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
        UpdateCounters local;
        for (std::size_t i = begin; i < end; ++i) {
          const auto src = static_cast<vertex_id>(i);
          const auto nb = g.neighbors(src);
          if (nb.empty()) continue;
          Rng rng = source_stream(cfg.seed, level, pass_id, src);
          update_embedding(m, src, nb[rng.below(nb.size())], 1, lr, cfg.update_rule);
          for (std::size_t k = 0; k < cfg.negative_samples; ++k)
            update_embedding(m, src, static_cast<vertex_id>(rng.below(n)), 0, lr, cfg.update_rule);
          ++local.positive;
          local.negative += cfg.negative_samples;
        }
        per_worker[w] += local;
      });
    }
  }
  UpdateCounters total;
  for (const auto& c : per_worker) total += c;
  return total;
}

// Row v of the result is row map[v] of the coarser matrix.
inline EmbeddingMatrix expand_embedding(const EmbeddingMatrix& coarse, const Mapping& m) {
  if (coarse.rows() != m.num_clusters) throw dimension_error("coarse embedding rows do not match cluster count");
  EmbeddingMatrix out(m.map.size(), coarse.dim());
  for (std::size_t v = 0; v < m.map.size(); ++v) {
    const auto src = coarse.row(m.map[v]);
    std::copy(src.begin(), src.end(), out.row(v).begin());
  }
  return out;
}

}  // namespace gosh
