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
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gosh/graph.hpp"
#include "gosh/parallel.hpp"

namespace gosh {

// map[v] is the id, in the next coarser graph, of the cluster holding v.
struct Mapping {
  std::vector<vertex_id> map;
  vertex_id num_clusters = 0;
};

// Every entry in range and every cluster id hit at least once.
inline bool is_valid_mapping(const Mapping& m) {
  std::vector<bool> hit(m.num_clusters, false);
  for (vertex_id c : m.map) {
    if (c >= m.num_clusters) return false;
    hit[c] = true;
  }
  return std::find(hit.begin(), hit.end(), false) == hit.end();
}

// Vertices by nonincreasing degree, ties by ascending id. Counting sort.
inline std::vector<vertex_id> degree_order(const Graph& g) {
  const vertex_id n = g.num_vertices();
  const std::size_t max_deg = g.max_degree();
  // bucket index = max_deg - degree, so high degrees come first
  std::vector<std::size_t> start(max_deg + 2, 0);
  for (vertex_id v = 0; v < n; ++v) ++start[max_deg - g.degree(v) + 1];
  for (std::size_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
  std::vector<vertex_id> order(n);
  for (vertex_id v = 0; v < n; ++v) order[start[max_deg - g.degree(v)]++] = v;
  return order;
}

// Sequential MultiEdgeCollapse mapping. Walking `order`, each unmapped vertex
// founds a new cluster and pulls in its unmapped neighbors, except across
// edges whose endpoints both have degree above the density |E|/|V| (arcs).
// Cluster ids are dense in discovery order.
inline Mapping collapse_map(const Graph& g, std::span<const vertex_id> order) {
  const vertex_id n = g.num_vertices();
  const double delta = g.density();
  Mapping m;
  m.map.assign(n, kNoVertex);
  for (vertex_id v : order) {
    if (m.map[v] != kNoVertex) continue;
    const vertex_id cluster = m.num_clusters++;
    m.map[v] = cluster;
    const bool v_small = static_cast<double>(g.degree(v)) <= delta;
    for (vertex_id u : g.neighbors(v)) {
      if (!v_small && static_cast<double>(g.degree(u)) > delta) continue;
      if (m.map[u] == kNoVertex) m.map[u] = cluster;
    }
  }
  return m;
}

inline constexpr std::size_t kCoarsenBatch = 64;

// Parallel MultiEdgeCollapse. Each map entry has a try-lock; a worker that
// fails to take one skips that candidate. Provisional cluster ids are hub
// vertex ids, renumbered afterwards in `order` so that one worker reproduces
// collapse_map exactly. With several workers the result is run-dependent.
inline Mapping collapse_map_parallel(const Graph& g, std::span<const vertex_id> order, unsigned num_workers) {
  const vertex_id n = g.num_vertices();
  const double delta = g.density();
  auto map = std::make_unique<std::atomic<vertex_id>[]>(n);
  auto locks = std::make_unique<std::atomic_flag[]>(n);
  for (vertex_id v = 0; v < n; ++v) map[v].store(kNoVertex, std::memory_order_relaxed);

  // Claims `target` for `hub` if it is unmapped and its lock is free.
  auto try_claim = [&](vertex_id target, vertex_id hub) {
    if (map[target].load(std::memory_order_relaxed) != kNoVertex) return false;
    if (locks[target].test_and_set(std::memory_order_acquire)) return false;
    bool claimed = false;
    if (map[target].load(std::memory_order_relaxed) == kNoVertex) {
      map[target].store(hub, std::memory_order_relaxed);
      claimed = true;
    }
    locks[target].clear(std::memory_order_release);
    return claimed;
  };

  parallel_for_dynamic(order.size(), kCoarsenBatch, num_workers,
                       [&](std::size_t begin, std::size_t end, unsigned) {
                         for (std::size_t i = begin; i < end; ++i) {
                           const vertex_id v = order[i];
                           if (!try_claim(v, v)) continue;
                           const bool v_small = static_cast<double>(g.degree(v)) <= delta;
                           for (vertex_id u : g.neighbors(v)) {
                             if (!v_small && static_cast<double>(g.degree(u)) > delta) continue;
                             try_claim(u, v);
                           }
                         }
                       });

  // Every vertex is a hub candidate itself, so nothing stays unmapped.
  Mapping m;
  m.map.resize(n);
  std::vector<vertex_id> dense(n, kNoVertex);
  for (vertex_id v : order)
    if (map[v].load(std::memory_order_relaxed) == v) dense[v] = m.num_clusters++;
  for (vertex_id v = 0; v < n; ++v) m.map[v] = dense[map[v].load(std::memory_order_relaxed)];
  return m;
}

// Contracts each cluster of `m` to one vertex. Arcs between distinct clusters
// are kept once; intra-cluster arcs vanish. Workers fill private buffers that
// are merged through a prefix sum over the new degrees.
inline Graph build_coarse_graph(const Graph& g, const Mapping& m, unsigned num_workers = 1) {
  const vertex_id n = g.num_vertices();
  const vertex_id k = m.num_clusters;

  // cluster -> member list, as CSR
  std::vector<edge_offset> member_off(static_cast<std::size_t>(k) + 1, 0);
  for (vertex_id v = 0; v < n; ++v) ++member_off[m.map[v] + 1];
  for (std::size_t i = 1; i < member_off.size(); ++i) member_off[i] += member_off[i - 1];
  std::vector<vertex_id> members(n);
  {
    std::vector<edge_offset> fill(member_off.begin(), member_off.end() - 1);
    for (vertex_id v = 0; v < n; ++v) members[fill[m.map[v]]++] = v;
  }

  num_workers = resolve_workers(num_workers);
  struct Slot {
    unsigned worker = 0;
    std::size_t offset = 0;
  };
  std::vector<std::vector<vertex_id>> buffers(num_workers);
  std::vector<Slot> slots(k);
  std::vector<edge_offset> xadj(static_cast<std::size_t>(k) + 1, 0);

  std::vector<std::vector<vertex_id>> markers(num_workers);
  parallel_for_dynamic(k, kCoarsenBatch, num_workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    auto& buf = buffers[w];
    auto& mark = markers[w];
    if (mark.empty()) mark.assign(k, kNoVertex);
    for (std::size_t c = begin; c < end; ++c) {
      const auto cluster = static_cast<vertex_id>(c);
      const std::size_t offset = buf.size();
      for (edge_offset i = member_off[c]; i < member_off[c + 1]; ++i) {
        for (vertex_id u : g.neighbors(members[i])) {
          const vertex_id target = m.map[u];
          if (target == cluster || mark[target] == cluster) continue;
          mark[target] = cluster;
          buf.push_back(target);
        }
      }
      std::sort(buf.begin() + static_cast<std::ptrdiff_t>(offset), buf.end());
      slots[c] = {w, offset};
      xadj[c + 1] = buf.size() - offset;
    }
  });

  for (std::size_t i = 1; i < xadj.size(); ++i) xadj[i] += xadj[i - 1];
  std::vector<vertex_id> adj(xadj.back());
  parallel_for_dynamic(k, kCoarsenBatch * 16, num_workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t c = begin; c < end; ++c) {
      const auto& buf = buffers[slots[c].worker];
      const std::size_t len = xadj[c + 1] - xadj[c];
      std::copy_n(buf.begin() + static_cast<std::ptrdiff_t>(slots[c].offset), len,
                  adj.begin() + static_cast<std::ptrdiff_t>(xadj[c]));
    }
  });
  return Graph::adopt(std::move(xadj), std::move(adj), g.directed());
}

struct LevelStats {
  std::size_t level = 0;
  vertex_id num_vertices = 0;
  edge_offset num_edges = 0;
  edge_offset num_arcs = 0;
  double elapsed_ms = 0.0;  // time spent producing this level from the previous one
};

struct Hierarchy {
  std::vector<Graph> graphs;      // G_0 .. G_{D-1}, finest first
  std::vector<Mapping> mappings;  // mappings[i] sends V_i to V_{i+1}
  std::vector<LevelStats> stats;
  bool stalled = false;  // stopped by the shrink guard rather than the threshold

  std::size_t depth() const noexcept { return graphs.size(); }
};

// A candidate level keeping more than this share of vertices ends coarsening.
inline constexpr double kShrinkStallRatio = 0.99;
inline constexpr std::size_t kDefaultCoarseningThreshold = 100;

inline LevelStats level_stats(std::size_t level, const Graph& g, double elapsed_ms) {
  return {level, g.num_vertices(), g.num_edges(), g.num_arcs(), elapsed_ms};
}

// Coarsens until the graph has at most `threshold` vertices or stops shrinking.
inline Hierarchy coarsen_all(const Graph& g, std::size_t threshold = kDefaultCoarseningThreshold,
                             unsigned num_workers = 1) {
  threshold = std::max<std::size_t>(threshold, 1);
  Hierarchy h;
  h.graphs.push_back(g);
  h.stats.push_back(level_stats(0, g, 0.0));
  while (h.graphs.back().num_vertices() > threshold) {
    const Graph& current = h.graphs.back();
    const auto t0 = std::chrono::steady_clock::now();
    const auto order = degree_order(current);
    Mapping m = num_workers == 1 ? collapse_map(current, order)
                                 : collapse_map_parallel(current, order, num_workers);
    Graph coarse = build_coarse_graph(current, m, num_workers);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (static_cast<double>(coarse.num_vertices()) > kShrinkStallRatio * current.num_vertices()) {
      h.stalled = true;
      break;
    }
    h.stats.push_back(level_stats(h.graphs.size(), coarse, ms));
    h.mappings.push_back(std::move(m));
    h.graphs.push_back(std::move(coarse));
  }
  return h;
}

// A single-level hierarchy (the no-coarsening configuration).
inline Hierarchy trivial_hierarchy(const Graph& g) {
  Hierarchy h;
  h.graphs.push_back(g);
  h.stats.push_back(level_stats(0, g, 0.0));
  return h;
}

}  // namespace gosh
