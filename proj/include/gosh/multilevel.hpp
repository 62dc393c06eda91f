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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "gosh/bigtrain.hpp"
#include "gosh/coarsen.hpp"
#include "gosh/config.hpp"
#include "gosh/embedding.hpp"
#include "gosh/schedule.hpp"
#include "gosh/trainer.hpp"

namespace gosh {

struct LevelReport {
  std::size_t level = 0;
  vertex_id num_vertices = 0;
  edge_offset num_arcs = 0;
  std::size_t epochs = 0;
  bool partitioned = false;
  std::size_t num_parts = 0;
  std::size_t rotations = 0;
  UpdateCounters updates;
  double train_ms = 0.0;
};

struct MultilevelResult {
  EmbeddingMatrix embedding;
  std::vector<LevelReport> levels;
  std::vector<LevelStats> coarsening;
  bool coarsening_stalled = false;
  double coarsen_ms = 0.0;
  double train_ms = 0.0;
};

// Seed of the random start at the coarsest level.
inline std::uint64_t initial_embedding_seed(std::uint64_t seed) noexcept { return derive_seed({seed, 0xe1u}); }

// True when the level's matrix and graph both fit the resident budget.
inline bool fits_in_memory(const Graph& g, std::size_t dim, const MemoryBudget& budget) noexcept {
  if (budget.unlimited()) return true;
  return static_cast<std::size_t>(g.num_vertices()) * dim * sizeof(float) + g.footprint_bytes() <=
         budget.resident_bytes;
}

inline nlohmann::json to_json(const LevelReport& r) {
  return {{"level", r.level},           {"num_vertices", r.num_vertices},
          {"num_arcs", r.num_arcs},     {"epochs", r.epochs},
          {"partitioned", r.partitioned}, {"num_parts", r.num_parts},
          {"rotations", r.rotations},   {"positive_updates", r.updates.positive},
          {"negative_updates", r.updates.negative}, {"train_ms", r.train_ms}};
}

// Coarsens g0, trains the coarsest level from a random start, then walks back
// to G_0 expanding and training each level. Levels that do not fit the
// budget go through the partitioned trainer.
inline MultilevelResult train_multilevel(const Graph& g0, const TrainConfig& cfg, const MemoryBudget& budget = {},
                                         std::ostream* log = nullptr) {
  cfg.validate();
  budget.validate();
  MultilevelResult out;

  const auto t0 = std::chrono::steady_clock::now();
  Hierarchy h = cfg.coarsen ? coarsen_all(g0, cfg.coarsening_threshold, cfg.num_workers) : trivial_hierarchy(g0);
  const auto t1 = std::chrono::steady_clock::now();
  out.coarsen_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.coarsening = h.stats;
  out.coarsening_stalled = h.stalled;

  const std::size_t depth = h.depth();
  const EpochPlan plan = epoch_plan(cfg.total_epochs, cfg.smoothing_ratio, depth);

  EmbeddingMatrix m = init_embedding(h.graphs.back().num_vertices(), cfg.dim, initial_embedding_seed(cfg.seed));
  for (std::size_t i = depth; i-- > 0;) {
    const Graph& g = h.graphs[i];
    const auto ts = std::chrono::steady_clock::now();
    LevelReport rep;
    rep.level = i;
    rep.num_vertices = g.num_vertices();
    rep.num_arcs = g.num_arcs();
    rep.epochs = plan.per_level[i];
    if (fits_in_memory(g, cfg.dim, budget)) {
      rep.updates = train_level(g, m, cfg, rep.epochs, cfg.learning_rate, i);
    } else {
      LargeTrainOptions opts;
      opts.level = i;
      opts.log = log;
      const LargeTrainReport lr = train_large(g, m, cfg, rep.epochs, cfg.learning_rate, budget, opts);
      rep.partitioned = true;
      rep.num_parts = lr.num_parts;
      rep.rotations = lr.rotations;
      rep.updates = lr.updates;
    }
    rep.train_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - ts).count();
    if (log) *log << nlohmann::json{{"event", "level"}, {"report", to_json(rep)}}.dump() << '\n';
    out.levels.push_back(rep);
    if (i > 0) m = expand_embedding(m, h.mappings[i - 1]);
  }
  out.train_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t1).count();
  out.embedding = std::move(m);
  return out;
}

}  // namespace gosh
