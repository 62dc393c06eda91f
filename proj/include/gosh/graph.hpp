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
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gosh/error.hpp"

namespace gosh {

using vertex_id = std::uint32_t;
using edge_offset = std::uint64_t;

inline constexpr vertex_id kNoVertex = std::numeric_limits<vertex_id>::max();

struct Edge {
  vertex_id u = 0;
  vertex_id v = 0;

  friend constexpr bool operator==(const Edge&, const Edge&) = default;
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable CSR adjacency. Neighbor lists are sorted ascending and free of
// duplicates and self-loops. Storage is shared between copies, so a Graph is
// a cheap value type; nothing mutates it after construction.
class Graph {
 public:
  Graph() : xadj_(std::make_shared<const std::vector<edge_offset>>(1, 0)),
            adj_(std::make_shared<const std::vector<vertex_id>>()) {}

  // Takes raw CSR arrays. Validates offsets and ids, sorts neighbor lists, and
  // for undirected graphs checks that every arc has its reverse.
  Graph(std::vector<edge_offset> xadj, std::vector<vertex_id> adj, bool directed)
      : directed_(directed) {
    if (xadj.empty() || xadj.front() != 0) throw input_error("xadj must start at 0");
    if (xadj.back() != adj.size()) throw input_error("xadj[|V|] must equal |E|");
    if (xadj.size() - 1 >= kNoVertex) throw input_error("too many vertices");
    const auto n = static_cast<vertex_id>(xadj.size() - 1);
    for (vertex_id v = 0; v < n; ++v) {
      if (xadj[v] > xadj[v + 1]) throw input_error("xadj must be nondecreasing");
      auto first = adj.begin() + static_cast<std::ptrdiff_t>(xadj[v]);
      auto last = adj.begin() + static_cast<std::ptrdiff_t>(xadj[v + 1]);
      std::sort(first, last);
      for (auto it = first; it != last; ++it) {
        if (*it >= n) throw input_error("neighbor id out of range");
        if (*it == v) throw input_error("self-loop in CSR input");
        if (it != first && *it == *(it - 1)) throw input_error("duplicate arc in CSR input");
      }
    }
    xadj_ = std::make_shared<const std::vector<edge_offset>>(std::move(xadj));
    adj_ = std::make_shared<const std::vector<vertex_id>>(std::move(adj));
    if (!directed_) {
      for (vertex_id v = 0; v < n; ++v)
        for (vertex_id u : neighbors(v))
          if (!has_arc(u, v)) throw input_error("undirected graph is not symmetric");
    }
  }

  // Builds from an arc list over [0, n): drops self-loops, removes duplicates,
  // and for undirected graphs stores each input edge in both directions.
  static Graph from_arcs(vertex_id n, std::span<const Edge> arcs, bool directed) {
    std::vector<edge_offset> xadj(static_cast<std::size_t>(n) + 1, 0);
    for (const Edge& e : arcs) {
      if (e.u >= n || e.v >= n) throw input_error("arc endpoint out of range");
      if (e.u == e.v) continue;
      ++xadj[e.u + 1];
      if (!directed) ++xadj[e.v + 1];
    }
    for (std::size_t i = 1; i < xadj.size(); ++i) xadj[i] += xadj[i - 1];
    std::vector<vertex_id> adj(xadj.back());
    std::vector<edge_offset> fill(xadj.begin(), xadj.end() - 1);
    for (const Edge& e : arcs) {
      if (e.u == e.v) continue;
      adj[fill[e.u]++] = e.v;
      if (!directed) adj[fill[e.v]++] = e.u;
    }
    // sort + unique each list, compacting in place
    edge_offset write = 0;
    edge_offset read_begin = 0;
    for (vertex_id v = 0; v < n; ++v) {
      const edge_offset read_end = xadj[v + 1];
      auto first = adj.begin() + static_cast<std::ptrdiff_t>(read_begin);
      auto last = adj.begin() + static_cast<std::ptrdiff_t>(read_end);
      std::sort(first, last);
      last = std::unique(first, last);
      const edge_offset kept = static_cast<edge_offset>(last - first);
      std::move(first, last, adj.begin() + static_cast<std::ptrdiff_t>(write));
      xadj[v] = write;
      write += kept;
      read_begin = read_end;
    }
    xadj[n] = write;
    adj.resize(write);
    adj.shrink_to_fit();
    return Graph(std::move(xadj), std::move(adj), directed, trusted{});
  }

  // Wraps CSR arrays the caller already guarantees to be valid (sorted,
  // in range, no duplicates, symmetric when undirected).
  static Graph adopt(std::vector<edge_offset> xadj, std::vector<vertex_id> adj, bool directed) {
    return Graph(std::move(xadj), std::move(adj), directed, trusted{});
  }

  vertex_id num_vertices() const noexcept { return static_cast<vertex_id>(xadj_->size() - 1); }
  // Stored directed arcs (|E| in CSR terms).
  edge_offset num_arcs() const noexcept { return adj_->size(); }
  // Undirected edges for symmetric graphs, arcs otherwise.
  edge_offset num_edges() const noexcept { return directed_ ? num_arcs() : num_arcs() / 2; }
  bool directed() const noexcept { return directed_; }
  bool empty() const noexcept { return num_vertices() == 0; }

  // |E| / |V| over stored arcs; 0 for an empty graph.
  double density() const noexcept {
    return empty() ? 0.0 : static_cast<double>(num_arcs()) / static_cast<double>(num_vertices());
  }

  std::span<const edge_offset> xadj() const noexcept { return *xadj_; }
  std::span<const vertex_id> adj() const noexcept { return *adj_; }

  std::span<const vertex_id> neighbors(vertex_id v) const noexcept {
    const auto& x = *xadj_;
    return std::span<const vertex_id>(adj_->data() + x[v], x[v + 1] - x[v]);
  }

  std::size_t degree(vertex_id v) const noexcept { return (*xadj_)[v + 1] - (*xadj_)[v]; }

  bool has_arc(vertex_id u, vertex_id v) const noexcept {
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  std::size_t max_degree() const noexcept {
    std::size_t best = 0;
    for (vertex_id v = 0; v < num_vertices(); ++v) best = std::max(best, degree(v));
    return best;
  }

  // Bytes of the two CSR arrays.
  std::size_t footprint_bytes() const noexcept {
    return xadj_->size() * sizeof(edge_offset) + adj_->size() * sizeof(vertex_id);
  }

 private:
  struct trusted {};
  Graph(std::vector<edge_offset> xadj, std::vector<vertex_id> adj, bool directed, trusted)
      : xadj_(std::make_shared<const std::vector<edge_offset>>(std::move(xadj))),
        adj_(std::make_shared<const std::vector<vertex_id>>(std::move(adj))),
        directed_(directed) {}

  std::shared_ptr<const std::vector<edge_offset>> xadj_;
  std::shared_ptr<const std::vector<vertex_id>> adj_;
  bool directed_ = false;
};

inline std::size_t degree(const Graph& g, vertex_id v) noexcept { return g.degree(v); }

// Each undirected edge once as (u, v) with u < v, in CSR order. For directed
// graphs every arc is returned.
inline std::vector<Edge> edge_list(const Graph& g) {
  std::vector<Edge> out;
  out.reserve(g.num_edges());
  for (vertex_id u = 0; u < g.num_vertices(); ++u)
    for (vertex_id v : g.neighbors(u))
      if (g.directed() || u < v) out.push_back({u, v});
  return out;
}

inline bool is_symmetric(const Graph& g) {
  for (vertex_id u = 0; u < g.num_vertices(); ++u)
    for (vertex_id v : g.neighbors(u))
      if (!g.has_arc(v, u)) return false;
  return true;
}

}  // namespace gosh
