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

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "gosh/coarsen.hpp"
#include "gosh/generators.hpp"
#include "test_util.h"

namespace gosh {
namespace {

// Every cluster has a founder that each other member is adjacent to, through
// an edge with at least one endpoint of degree <= density.
bool respects_hub_rule(const Graph& g, const Mapping& m) {
  const double delta = g.density();
  std::vector<std::vector<vertex_id>> members(m.num_clusters);
  for (vertex_id v = 0; v < m.map.size(); ++v) members[m.map[v]].push_back(v);
  for (const auto& c : members) {
    const bool ok = std::any_of(c.begin(), c.end(), [&](vertex_id f) {
      return std::all_of(c.begin(), c.end(), [&](vertex_id u) {
        return u == f || (g.has_arc(f, u) && std::min<double>(g.degree(f), g.degree(u)) <= delta);
      });
    });
    if (!ok) return false;
  }
  return true;
}

Graph two_hubs(vertex_id leaves) {
  std::vector<Edge> arcs{{0, 1}};
  for (vertex_id i = 0; i < leaves; ++i) {
    arcs.push_back({0, 2 + i});
    arcs.push_back({1, 2 + leaves + i});
  }
  return Graph::from_arcs(2 + 2 * leaves, arcs, false);
}

TEST(DegreeOrder, Examples) {
  EXPECT_EQ(degree_order(gen::star(5)).front(), 0u);
  std::vector<vertex_id> identity(6);
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_EQ(degree_order(gen::cycle(6)), identity);
  // out-degrees [1, 3, 2, 0]
  const Graph g = Graph::from_arcs(4, std::vector<Edge>{{0, 1}, {1, 0}, {1, 2}, {1, 3}, {2, 0}, {2, 1}}, true);
  EXPECT_EQ(degree_order(g), (std::vector<vertex_id>{1, 2, 0, 3}));
  // undirected degrees [1, 3, 2, 2]
  const Graph h = Graph::from_arcs(4, std::vector<Edge>{{0, 1}, {1, 2}, {1, 3}, {2, 3}}, false);
  EXPECT_EQ(degree_order(h), (std::vector<vertex_id>{1, 2, 3, 0}));
}

TEST(DegreeOrderProperty, SortedWithAscendingTies) {
  Rng rng{21};
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = testing::random_graph(rng);
    const auto order = degree_order(g);
    ASSERT_EQ(order.size(), g.num_vertices());
    EXPECT_TRUE(std::is_permutation(order.begin(), order.end(), [&] {
      std::vector<vertex_id> ids(g.num_vertices());
      std::iota(ids.begin(), ids.end(), 0);
      return ids;
    }().begin()));
    for (std::size_t i = 1; i < order.size(); ++i) {
      const auto a = order[i - 1], b = order[i];
      EXPECT_TRUE(g.degree(a) > g.degree(b) || (g.degree(a) == g.degree(b) && a < b));
    }
  }
}

TEST(CollapseMap, TriangleIsOneCluster) {
  const Graph tri = gen::complete(3);
  const Mapping m = collapse_map(tri, degree_order(tri));
  EXPECT_EQ(m.num_clusters, 1u);
  EXPECT_EQ(m.map, (std::vector<vertex_id>{0, 0, 0}));
}

TEST(CollapseMap, HubsStayApart) {
  const Graph g = two_hubs(10);
  ASSERT_GT(g.degree(0), g.density());
  ASSERT_GT(g.degree(1), g.density());
  const Mapping m = collapse_map(g, degree_order(g));
  EXPECT_NE(m.map[0], m.map[1]);
  EXPECT_EQ(m.num_clusters, 2u);
  for (vertex_id i = 0; i < 10; ++i) {
    EXPECT_EQ(m.map[2 + i], m.map[0]);
    EXPECT_EQ(m.map[12 + i], m.map[1]);
  }
}

TEST(CollapseMap, EdgelessGivesSingletons) {
  const Graph g = Graph::from_arcs(7, std::vector<Edge>{}, false);
  const Mapping m = collapse_map(g, degree_order(g));
  EXPECT_EQ(m.num_clusters, 7u);
  EXPECT_TRUE(is_valid_mapping(m));
  for (unsigned w : {1u, 3u}) EXPECT_EQ(collapse_map_parallel(g, degree_order(g), w).num_clusters, 7u);
}

TEST(CollapseMap, HandTrace) {
  // path 0-1-2-3-4: arcs 8, density 1.6; only the endpoints have degree <= 1.6.
  // Order [1,2,3,0,4]: 1 founds c0 and takes 0; 2 founds c1 (1 is marked,
  // 3 has degree 2 with 2 also > 1.6); 3 founds c2 taking 4.
  const Graph p = gen::path(5);
  const Mapping m = collapse_map(p, degree_order(p));
  EXPECT_EQ(m.map, (std::vector<vertex_id>{0, 0, 1, 2, 2}));
  EXPECT_EQ(m.num_clusters, 3u);
}

TEST(CollapseMapProperty, ValidHubSafeAndPure) {
  Rng rng{22};
  for (int trial = 0; trial < 300; ++trial) {
    const Graph g = testing::random_graph(rng);
    const auto order = degree_order(g);
    const Mapping m = collapse_map(g, order);
    ASSERT_TRUE(is_valid_mapping(m));
    EXPECT_TRUE(respects_hub_rule(g, m));
    EXPECT_EQ(collapse_map(g, order).map, m.map);
    // cluster ids appear in discovery order
    vertex_id seen = 0;
    for (vertex_id v : order) {
      EXPECT_LE(m.map[v], seen);
      if (m.map[v] == seen) ++seen;
    }
  }
}

TEST(CollapseMapParallel, OneWorkerMatchesSequential) {
  Rng rng{23};
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = testing::random_graph(rng, 200);
    const auto order = degree_order(g);
    EXPECT_EQ(collapse_map_parallel(g, order, 1).map, collapse_map(g, order).map);
  }
  const Graph big = gen::collaboration(gen::dblp_like(5000), 1);
  const auto order = degree_order(big);
  EXPECT_EQ(collapse_map_parallel(big, order, 1).map, collapse_map(big, order).map);
}

TEST(CollapseMapParallel, ManyWorkersValid) {
  Rng rng{24};
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = trial % 2 ? testing::random_graph(rng, 400) : gen::chung_lu(3000, 8.0, 2.2, trial);
    const auto order = degree_order(g);
    for (unsigned w : {2u, 4u, 8u}) {
      const Mapping m = collapse_map_parallel(g, order, w);
      ASSERT_TRUE(is_valid_mapping(m));
      EXPECT_TRUE(respects_hub_rule(g, m));
    }
  }
}

TEST(BuildCoarseGraph, Examples) {
  const Graph tri = gen::complete(3);
  const Graph one = build_coarse_graph(tri, Mapping{{0, 0, 0}, 1});
  EXPECT_EQ(one.num_vertices(), 1u);
  EXPECT_EQ(one.num_arcs(), 0u);

  const Graph ab = build_coarse_graph(gen::path(4), Mapping{{0, 0, 1, 1}, 2});
  EXPECT_EQ(ab.num_vertices(), 2u);
  EXPECT_EQ(ab.num_edges(), 1u);
  EXPECT_TRUE(ab.has_arc(0, 1));
  EXPECT_TRUE(ab.has_arc(1, 0));

  const Graph g = gen::erdos_renyi(50, 120, 3);
  Mapping id{std::vector<vertex_id>(50), 50};
  std::iota(id.map.begin(), id.map.end(), 0);
  const Graph same = build_coarse_graph(g, id, 3);
  EXPECT_EQ(std::vector<edge_offset>(same.xadj().begin(), same.xadj().end()),
            std::vector<edge_offset>(g.xadj().begin(), g.xadj().end()));
  EXPECT_EQ(std::vector<vertex_id>(same.adj().begin(), same.adj().end()),
            std::vector<vertex_id>(g.adj().begin(), g.adj().end()));
}

TEST(BuildCoarseGraphProperty, ArcsAreImagesAndConnectivityKept) {
  Rng rng{25};
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = testing::random_graph(rng, 120);
    const Mapping m = collapse_map(g, degree_order(g));
    const unsigned workers = 1 + trial % 4;
    const Graph c = build_coarse_graph(g, m, workers);
    ASSERT_EQ(c.num_vertices(), m.num_clusters);
    // CSR invariants revalidated by the checking constructor
    EXPECT_NO_THROW(Graph(std::vector<edge_offset>(c.xadj().begin(), c.xadj().end()),
                          std::vector<vertex_id>(c.adj().begin(), c.adj().end()), false));
    std::set<std::pair<vertex_id, vertex_id>> expect;
    for (vertex_id v = 0; v < g.num_vertices(); ++v)
      for (vertex_id u : g.neighbors(v))
        if (m.map[u] != m.map[v]) expect.insert({m.map[v], m.map[u]});
    std::set<std::pair<vertex_id, vertex_id>> got;
    for (vertex_id a = 0; a < c.num_vertices(); ++a)
      for (vertex_id b : c.neighbors(a)) got.insert({a, b});
    EXPECT_EQ(got, expect);

    const auto fine = testing::components(g);
    const auto coarse = testing::components(c);
    for (vertex_id u = 0; u < g.num_vertices(); ++u)
      for (vertex_id v = u + 1; v < g.num_vertices(); ++v)
        if (fine[u] == fine[v]) {
          EXPECT_EQ(coarse[m.map[u]], coarse[m.map[v]]);
        }
  }
}

TEST(CoarsenAll, SmallGraphIsOneLevel) {
  const Graph g = gen::path(50);
  const Hierarchy h = coarsen_all(g, 100);
  EXPECT_EQ(h.depth(), 1u);
  EXPECT_TRUE(h.mappings.empty());
  EXPECT_EQ(coarsen_all(gen::path(300), 300).depth(), 1u);
}

TEST(CoarsenAll, StallGuardStopsOnEdgeless) {
  const Graph g = Graph::from_arcs(500, std::vector<Edge>{{0, 1}}, false);
  const Hierarchy h = coarsen_all(g, 100);
  EXPECT_TRUE(h.stalled);
  EXPECT_EQ(h.depth(), 1u);
}

TEST(CoarsenAll, HierarchyInvariants) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Graph g = gen::collaboration(gen::dblp_like(8000), seed);
    for (unsigned w : {1u, 4u}) {
      const Hierarchy h = coarsen_all(g, 100, w);
      ASSERT_EQ(h.mappings.size() + 1, h.depth());
      ASSERT_EQ(h.stats.size(), h.depth());
      EXPECT_TRUE(h.stalled || h.graphs.back().num_vertices() <= 100);
      for (std::size_t i = 0; i + 1 < h.depth(); ++i) {
        EXPECT_LT(h.graphs[i + 1].num_vertices(), h.graphs[i].num_vertices());
        EXPECT_EQ(h.mappings[i].map.size(), h.graphs[i].num_vertices());
        EXPECT_EQ(h.mappings[i].num_clusters, h.graphs[i + 1].num_vertices());
        EXPECT_TRUE(is_valid_mapping(h.mappings[i]));
      }
      for (std::size_t i = 0; i < h.depth(); ++i) {
        EXPECT_EQ(h.stats[i].level, i);
        EXPECT_EQ(h.stats[i].num_vertices, h.graphs[i].num_vertices());
        EXPECT_EQ(h.stats[i].num_edges, h.graphs[i].num_edges());
      }
    }
  }
}

TEST(CoarsenAll, RuntimeRoughlyLinearInEdges) {
  auto best_ms = [](const Graph& g) {
    double best = 1e300;
    for (int r = 0; r < 3; ++r) {
      const auto t = std::chrono::steady_clock::now();
      const Hierarchy h = coarsen_all(g, 100, 1);
      best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count());
      EXPECT_GE(h.depth(), 2u);
    }
    return best;
  };
  const double t1 = best_ms(gen::erdos_renyi(40000, 200000, 1));
  const double t2 = best_ms(gen::erdos_renyi(40000, 400000, 1));
  EXPECT_LT(t2, 3.0 * t1) << t1 << " ms vs " << t2 << " ms";
}

}  // namespace
}  // namespace gosh
