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
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "gosh/graph.hpp"
#include "gosh/random.hpp"

// Synthetic undirected graphs for tests, benchmarks, and stand-ins when real
// SNAP datasets are not at hand.
namespace gosh::gen {

// Drops vertices without edges and re-densifies ids.
inline Graph compact(vertex_id n, std::vector<Edge> arcs) {
  std::vector<vertex_id> remap(n, kNoVertex);
  for (const Edge& e : arcs)
    if (e.u != e.v) remap[e.u] = remap[e.v] = 0;
  vertex_id next = 0;
  for (auto& r : remap)
    if (r != kNoVertex) r = next++;
  std::vector<Edge> kept;
  kept.reserve(arcs.size());
  for (const Edge& e : arcs)
    if (e.u != e.v) kept.push_back({remap[e.u], remap[e.v]});
  return Graph::from_arcs(next, kept, false);
}

// Induced subgraph on the largest connected component, ids renumbered in order.
inline Graph largest_component(const Graph& g) {
  const vertex_id n = g.num_vertices();
  std::vector<vertex_id> comp(n, kNoVertex), stack;
  vertex_id best = kNoVertex;
  std::size_t best_size = 0;
  for (vertex_id s = 0, id = 0; s < n; ++s) {
    if (comp[s] != kNoVertex) continue;
    std::size_t size = 0;
    comp[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const vertex_id v = stack.back();
      stack.pop_back();
      ++size;
      for (vertex_id u : g.neighbors(v))
        if (comp[u] == kNoVertex) {
          comp[u] = id;
          stack.push_back(u);
        }
    }
    if (size > best_size) {
      best_size = size;
      best = id;
    }
    ++id;
  }
  std::vector<Edge> arcs;
  for (vertex_id v = 0; v < n; ++v)
    if (comp[v] == best)
      for (vertex_id u : g.neighbors(v))
        if (v < u) arcs.push_back({v, u});
  return compact(n, std::move(arcs));
}

inline Graph path(vertex_id n) {
  std::vector<Edge> e;
  for (vertex_id i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph::from_arcs(n, e, false);
}

inline Graph star(vertex_id leaves) {
  std::vector<Edge> e;
  for (vertex_id i = 1; i <= leaves; ++i) e.push_back({0, i});
  return Graph::from_arcs(leaves + 1, e, false);
}

inline Graph complete(vertex_id n) {
  std::vector<Edge> e;
  for (vertex_id i = 0; i < n; ++i)
    for (vertex_id j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph::from_arcs(n, e, false);
}

inline Graph cycle(vertex_id n) {
  std::vector<Edge> e;
  for (vertex_id i = 0; i < n; ++i) e.push_back({i, static_cast<vertex_id>((i + 1) % n)});
  return Graph::from_arcs(n, e, false);
}

// G(n, m) with m edge draws (duplicates and loops collapse, so slightly fewer).
inline Graph erdos_renyi(vertex_id n, std::size_t m, std::uint64_t seed) {
  Rng rng{seed, 0xe7u};
  std::vector<Edge> e;
  e.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    e.push_back({static_cast<vertex_id>(rng.below(n)), static_cast<vertex_id>(rng.below(n))});
  return Graph::from_arcs(n, e, false);
}

// Chung-Lu graph with power-law expected degrees (tail exponent `exponent`)
// and the given mean degree. Isolated vertices are dropped.
inline Graph chung_lu(vertex_id n, double avg_degree, double exponent, std::uint64_t seed) {
  Rng rng{seed, 0xc1u};
  std::vector<double> cum(n);
  const double a = 1.0 / (exponent - 1.0);
  double total = 0.0;
  for (vertex_id v = 0; v < n; ++v) {
    total += std::pow(static_cast<double>(v) + 1.0, -a);
    cum[v] = total;
  }
  const auto m = static_cast<std::size_t>(avg_degree * n / 2.0);
  auto pick = [&] {
    const double x = rng.uniform() * total;
    return static_cast<vertex_id>(std::lower_bound(cum.begin(), cum.end(), x) - cum.begin());
  };
  std::vector<Edge> e;
  e.reserve(m);
  for (std::size_t i = 0; i < m; ++i) e.push_back({pick(), pick()});
  return compact(n, std::move(e));
}

struct CollaborationParams {
  vertex_id num_vertices = 20000;
  double avg_degree = 6.6;          // arcs per vertex, as |E|/|V| with arcs
  std::size_t min_community = 6;
  std::size_t max_community = 150;
  double community_exponent = 2.0;  // community size tail
  std::size_t min_group = 2;
  std::size_t max_group = 6;
  double activity_exponent = 2.5;   // per-vertex activity tail
  double cross_probability = 0.08;  // group member drawn from anywhere
};

// Co-authorship style graph: vertices belong to communities, and edges come
// from small cliques (co-author groups) drawn inside one community with heavy-tailed
// member activity plus a few cross-community members. Produces high
// clustering and skewed degrees, like co-authorship and co-purchase networks.
inline Graph collaboration(const CollaborationParams& p, std::uint64_t seed) {
  Rng rng{seed, 0xc011u};
  const vertex_id n = p.num_vertices;

  // communities as contiguous id blocks
  std::vector<vertex_id> comm_begin{0};
  while (comm_begin.back() < n) {
    const double u = rng.uniform();
    const double lo = static_cast<double>(p.min_community), hi = static_cast<double>(p.max_community);
    const double b = 1.0 - p.community_exponent;
    const double size = std::pow(std::pow(lo, b) + u * (std::pow(hi, b) - std::pow(lo, b)), 1.0 / b);
    const auto next = static_cast<vertex_id>(std::min<double>(n, comm_begin.back() + std::max(2.0, size)));
    comm_begin.push_back(next);
  }
  const std::size_t num_comms = comm_begin.size() - 1;

  // per-vertex activity, cumulative within each community
  std::vector<double> cum(n);
  for (std::size_t c = 0; c < num_comms; ++c) {
    double acc = 0.0;
    for (vertex_id v = comm_begin[c]; v < comm_begin[c + 1]; ++v) {
      acc += std::pow(1.0 - rng.uniform(), -1.0 / (p.activity_exponent - 1.0));
      cum[v] = acc;
    }
  }
  auto pick_in = [&](std::size_t c) {
    const auto first = cum.begin() + comm_begin[c];
    const auto last = cum.begin() + comm_begin[c + 1];
    const double x = rng.uniform() * *(last - 1);
    return static_cast<vertex_id>(std::lower_bound(first, last, x) - cum.begin());
  };

  // Stop once the deduplicated edge set reaches the requested arcs per
  // touched vertex; isolated ids are dropped by compact().
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint8_t> touched(n, 0);
  std::size_t num_touched = 0;
  std::vector<Edge> arcs;
  std::vector<vertex_id> group;
  while (num_touched == 0 || 2.0 * static_cast<double>(arcs.size()) < p.avg_degree * static_cast<double>(num_touched)) {
    const auto c = static_cast<std::size_t>(std::upper_bound(comm_begin.begin(), comm_begin.end(),
                                                             static_cast<vertex_id>(rng.below(n))) -
                                            comm_begin.begin() - 1);
    const std::size_t s = p.min_group + rng.below(p.max_group - p.min_group + 1);
    group.clear();
    for (std::size_t i = 0; i < s; ++i) {
      const vertex_id v = rng.uniform() < p.cross_probability ? pick_in(rng.below(num_comms)) : pick_in(c);
      if (std::find(group.begin(), group.end(), v) == group.end()) group.push_back(v);
    }
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const vertex_id a = std::min(group[i], group[j]), b = std::max(group[i], group[j]);
        if (!seen.insert((std::uint64_t{a} << 32) | b).second) continue;
        arcs.push_back({a, b});
        for (vertex_id x : {a, b})
          if (!touched[x]) {
            touched[x] = 1;
            ++num_touched;
          }
      }
  }
  // only the giant component is kept, as in the SNAP community graphs
  return largest_component(compact(n, std::move(arcs)));
}

// Stand-ins matching the arc density of the SNAP com-dblp and com-amazon graphs.
inline CollaborationParams dblp_like(vertex_id n) {
  CollaborationParams p;
  p.num_vertices = n;
  p.avg_degree = 6.55;
  return p;
}

inline CollaborationParams amazon_like(vertex_id n) {
  CollaborationParams p;
  p.num_vertices = n;
  p.avg_degree = 5.47;
  p.min_community = 4;
  p.max_community = 60;
  p.max_group = 4;
  p.cross_probability = 0.05;
  return p;
}

}  // namespace gosh::gen
