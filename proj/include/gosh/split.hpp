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

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "gosh/error.hpp"
#include "gosh/graph.hpp"
#include "gosh/random.hpp"

namespace gosh {

struct SplitResult {
  Graph train_graph;
  // Withheld edges whose endpoints both survive in train_graph, in train ids.
  std::vector<Edge> test_edges;
  // train id -> id in the graph that was split.
  std::vector<vertex_id> train_to_input;
  // Number of edges withheld before endpoint filtering.
  std::size_t withheld = 0;
};

// Withholds round(test_fraction * |E|) uniformly chosen undirected edges,
// drops vertices left isolated in the training graph, and re-densifies ids.
// Pure function of (g, test_fraction, seed).
inline SplitResult split_train_test(const Graph& g, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw split_error("test fraction must be in (0, 1)");
  if (g.directed()) throw split_error("train/test split expects an undirected graph");

  std::vector<Edge> edges = edge_list(g);
  const std::size_t m = edges.size();
  const auto k = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(m)));
  if (k == 0 || k >= m) throw split_error("graph too small to withhold " + std::to_string(k) +
                                          " of " + std::to_string(m) + " edges");

  Rng rng{seed, 0x5b11u};
  for (std::size_t i = m - 1; i > 0; --i) std::swap(edges[i], edges[rng.below(i + 1)]);

  const std::span<const Edge> test(edges.data(), k);
  const std::span<const Edge> train(edges.data() + k, m - k);

  std::vector<vertex_id> remap(g.num_vertices(), kNoVertex);
  for (const Edge& e : train) remap[e.u] = remap[e.v] = 0;
  SplitResult out;
  out.withheld = k;
  vertex_id next = 0;
  for (vertex_id v = 0; v < g.num_vertices(); ++v) {
    if (remap[v] == kNoVertex) continue;
    remap[v] = next++;
    out.train_to_input.push_back(v);
  }

  std::vector<Edge> train_arcs;
  train_arcs.reserve(train.size());
  for (const Edge& e : train) train_arcs.push_back({remap[e.u], remap[e.v]});
  out.train_graph = Graph::from_arcs(next, train_arcs, false);

  for (const Edge& e : test)
    if (remap[e.u] != kNoVertex && remap[e.v] != kNoVertex) out.test_edges.push_back({remap[e.u], remap[e.v]});
  return out;
}

}  // namespace gosh
