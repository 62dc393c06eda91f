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
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gosh/bigtrain.hpp"
#include "gosh/bounded_queue.hpp"
#include "gosh/generators.hpp"
#include "gosh/multilevel.hpp"
#include "test_util.h"

namespace gosh {
namespace {

MemoryBudget budget_for(std::size_t bytes, std::size_t p = 3, std::size_t s = 4, std::size_t b = 5) {
  MemoryBudget m;
  m.resident_bytes = bytes;
  m.parts_resident = p;
  m.pools_resident = s;
  m.batch_size = b;
  return m;
}

// Smallest budget for which plan_partitions picks exactly k parts.
std::size_t budget_for_parts(std::size_t rows, std::size_t dim, std::size_t k, const MemoryBudget& shape) {
  return resident_footprint(rows, dim, k, shape);
}

TEST(PartitionPlan, EqualContiguousParts) {
  for (std::size_t n : {1u, 7u, 10u, 1000u, 1001u}) {
    for (std::size_t k = 1; k <= std::min<std::size_t>(n, 12); ++k) {
      const PartitionPlan plan(n, k);
      ASSERT_EQ(plan.boundaries().size(), k + 1);
      EXPECT_EQ(plan.begin(0), 0u);
      EXPECT_EQ(plan.end(k - 1), n);
      std::size_t lo = n, hi = 0;
      for (std::size_t p = 0; p < k; ++p) {
        lo = std::min(lo, plan.size(p));
        hi = std::max(hi, plan.size(p));
        for (std::size_t v = plan.begin(p); v < plan.end(p); ++v) ASSERT_EQ(plan.part_of(v), p);
      }
      EXPECT_LE(hi - lo, 1u);
      EXPECT_EQ(plan.max_part_rows(), hi);
    }
  }
}

TEST(PlanPartitions, UnlimitedAndFittingBudgetsUsePParts) {
  EXPECT_EQ(plan_partitions(1000, 16, MemoryBudget{}).num_parts(), 3u);
  const MemoryBudget shape = budget_for(0);
  const std::size_t exact = budget_for_parts(1000, 16, 3, shape);
  EXPECT_EQ(plan_partitions(1000, 16, budget_for(exact)).num_parts(), 3u);
  EXPECT_EQ(plan_partitions(1000, 16, budget_for(exact - 1)).num_parts(), 4u);
}

TEST(PlanPartitions, MillionRowsIn512MiB) {
  const std::size_t rows = 1000000, dim = 128, budget = 512ull << 20;
  // independent arithmetic: three bins of ceil(rows/K) rows of d floats, plus
  // four staged pools holding two parts' worth of five 4-byte targets per row
  auto footprint = [&](std::size_t k) {
    const std::size_t part = (rows + k - 1) / k;
    return 3 * part * dim * 4 + 4 * (2 * part * 5 * 4);
  };
  ASSERT_GT(footprint(3), budget);  // 512,001,024 + 53,333,440 > 536,870,912
  ASSERT_LE(footprint(4), budget);
  EXPECT_EQ(3 * ((rows + 2) / 3) * dim * 4, 512001024u);
  EXPECT_EQ(plan_partitions(rows, dim, budget_for(budget)).num_parts(), 4u);
}

TEST(PlanPartitions, HalvingBudgetNeverShrinksKAndInfeasibleThrows) {
  Rng rng{51};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 10 + rng.below(200000);
    const std::size_t dim = 1 + rng.below(256);
    const std::size_t p = 2 + rng.below(4);
    std::size_t bytes = resident_footprint(rows, dim, p, budget_for(0, p)) * (1 + rng.below(3));
    std::size_t last_k = 0;
    while (true) {
      const MemoryBudget b = budget_for(bytes, p);
      if (!(resident_footprint(rows, dim, std::max(p, rows), b) <= bytes)) {
        EXPECT_THROW(plan_partitions(rows, dim, b), plan_error);
        break;
      }
      const PartitionPlan plan = plan_partitions(rows, dim, b);
      EXPECT_GE(plan.num_parts(), last_k);
      EXPECT_GE(plan.num_parts(), p);
      EXPECT_LE(resident_footprint(rows, dim, plan.num_parts(), b), bytes);
      if (plan.num_parts() > p) {
        EXPECT_GT(resident_footprint(rows, dim, plan.num_parts() - 1, b), bytes);
      }
      last_k = plan.num_parts();
      bytes /= 2;
    }
  }
}

TEST(MemoryBudget, Validation) {
  EXPECT_THROW(budget_for(0, 1).validate(), config_error);
  EXPECT_THROW(budget_for(0, 3, 0).validate(), config_error);
  EXPECT_THROW(budget_for(0, 3, 4, 0).validate(), config_error);
  EXPECT_NO_THROW(budget_for(0, 2, 1, 1).validate());
}

TEST(RotationPairs, Examples) {
  EXPECT_EQ(rotation_pairs(1), (std::vector<PartPair>{{0, 0}}));
  EXPECT_EQ(rotation_pairs(3), (std::vector<PartPair>{{0, 0}, {1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}}));
}

TEST(RotationPairsProperty, EveryUnorderedPairOnce) {
  for (std::size_t k = 1; k <= 50; ++k) {
    const auto pairs = rotation_pairs(k);
    ASSERT_EQ(pairs.size(), k * (k + 1) / 2);
    std::vector<PartPair> brute;
    for (std::uint32_t a = 0; a < k; ++a)
      for (std::uint32_t b = 0; b <= a; ++b) brute.push_back({a, b});
    EXPECT_EQ(pairs, brute);
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> seen;
    for (const PartPair& p : pairs) ++seen[std::minmax(p.a, p.b)];
    EXPECT_EQ(seen.size(), pairs.size());
  }
}

TEST(SamplePool, DiagonalUsesWithinPartNeighbors) {
  const Graph g = gen::complete(6);
  const PartitionPlan plan(6, 2);
  const SamplePool pool = build_sample_pool(g, plan, {1, 1}, 4, 7);
  EXPECT_TRUE(pool.second_targets.empty());
  ASSERT_EQ(pool.first_targets.size(), 3u * 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t s = 0; s < 4; ++s) {
      const vertex_id t = pool.first_targets[i * 4 + s];
      EXPECT_GE(t, 3u);
      EXPECT_NE(t, 3 + i);
    }
}

TEST(SamplePool, NoCrossEdgesMeansAllAbsent) {
  // two disjoint triangles, one per part
  const Graph g = Graph::from_arcs(6, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}, false);
  const SamplePool pool = build_sample_pool(g, PartitionPlan(6, 2), {1, 0}, 5, 1);
  for (vertex_id t : pool.first_targets) EXPECT_EQ(t, kNoVertex);
  for (vertex_id t : pool.second_targets) EXPECT_EQ(t, kNoVertex);

  std::vector<float> a(3 * 4, 0.5f), b(3 * 4, 0.25f);
  const auto a0 = a, b0 = b;
  const UpdateCounters c =
      train_pair({3, 3, 4, a}, {0, 3, 4, b}, pool, 3, 0.1f, 1);
  EXPECT_EQ(c.positive + c.negative, 0u);
  EXPECT_EQ(a, a0);
  EXPECT_EQ(b, b0);
}

TEST(SamplePool, SingleCrossNeighborAlwaysChosen) {
  const Graph g = Graph::from_arcs(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}}, false);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SamplePool pool = build_sample_pool(g, PartitionPlan(4, 2), {1, 0}, 1, seed);
    // part 1 = {2, 3}; only 2 has a neighbor (1) in part 0
    EXPECT_EQ(pool.first_targets, (std::vector<vertex_id>{1, kNoVertex}));
    EXPECT_EQ(pool.second_targets, (std::vector<vertex_id>{kNoVertex, 2}));
  }
}

TEST(SamplePoolProperty, TargetsAreNeighborsInOppositePart) {
  Rng rng{52};
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = testing::random_graph(rng, 100);
    const std::size_t k = 1 + rng.below(std::min<std::size_t>(g.num_vertices(), 6));
    const PartitionPlan plan(g.num_vertices(), k);
    const std::size_t batch = 1 + rng.below(6);
    for (const PartPair& pair : rotation_pairs(k)) {
      const SamplePool pool = build_sample_pool(g, plan, pair, batch, trial, 1 + trial % 3);
      auto check = [&](std::size_t src_begin, std::size_t src_size, std::uint32_t dst,
                       const std::vector<vertex_id>& targets) {
        ASSERT_EQ(targets.size(), src_size * batch);
        for (std::size_t i = 0; i < src_size; ++i) {
          const auto v = static_cast<vertex_id>(src_begin + i);
          const bool has = std::any_of(g.neighbors(v).begin(), g.neighbors(v).end(),
                                       [&](vertex_id u) { return plan.part_of(u) == dst; });
          for (std::size_t s = 0; s < batch; ++s) {
            const vertex_id t = targets[i * batch + s];
            if (!has) {
              EXPECT_EQ(t, kNoVertex);
              continue;
            }
            ASSERT_NE(t, kNoVertex);
            EXPECT_TRUE(g.has_arc(v, t));
            EXPECT_EQ(plan.part_of(t), dst);
          }
        }
      };
      check(pool.first_begin, pool.first_size, pair.b, pool.first_targets);
      if (!pair.diagonal()) check(pool.second_begin, pool.second_size, pair.a, pool.second_targets);
    }
  }
}

TEST(TrainPair, SinglePartMatchesOneVertexPassCounts) {
  const Graph g = gen::collaboration(gen::dblp_like(1500), 3);
  const PartitionPlan plan(g.num_vertices(), 1);
  const SamplePool pool = build_sample_pool(g, plan, {0, 0}, 1, 9);
  EmbeddingMatrix m = init_embedding(g.num_vertices(), 8, 1);
  const SubMatrixView all{0, m.rows(), m.dim(), m.data()};
  const UpdateCounters pair_counts = train_pair(all, all, pool, 3, 0.025f, 4);

  EmbeddingMatrix m2 = init_embedding(g.num_vertices(), 8, 1);
  TrainConfig cfg;
  cfg.negative_samples = 3;
  const UpdateCounters level_counts = train_level(g, m2, cfg, 1, 0.025);
  EXPECT_EQ(pair_counts, level_counts);
  EXPECT_TRUE(m.all_finite());
}

TEST(TrainPair, OnlyTouchesRowsOfThePair) {
  const Graph g = gen::collaboration(gen::dblp_like(2000), 3);
  const PartitionPlan plan(g.num_vertices(), 4);
  EmbeddingMatrix m = init_embedding(g.num_vertices(), 8, 2);
  const EmbeddingMatrix before = m;
  MemoryBackingStore store(m);
  FootprintMeter meter(0);
  {
    ResidentSubmatrices resident(plan, m.dim(), 2, store, meter);
    resident.switch_in(kEmptyBin, 1);
    resident.switch_in(kEmptyBin, 3);
    const SamplePool pool = build_sample_pool(g, plan, {3, 1}, 5, 3);
    const UpdateCounters c = train_pair(resident.view(3), resident.view(1), pool, 3, 0.05f, 5);
    EXPECT_GT(c.positive, 0u);
    EXPECT_THROW(train_pair(resident.view(1), resident.view(3), pool, 3, 0.05f, 5), scheduling_error);
    EXPECT_THROW(resident.view(0), scheduling_error);
    resident.flush_all();
  }
  std::size_t changed_inside = 0;
  for (std::size_t v = 0; v < m.rows(); ++v) {
    const bool same = std::equal(m.row(v).begin(), m.row(v).end(), before.row(v).begin());
    const std::size_t part = plan.part_of(v);
    if (part == 0 || part == 2) {
      EXPECT_TRUE(same) << "row " << v;
    }
    else changed_inside += !same;
  }
  EXPECT_GT(changed_inside, 0u);
}

TEST(NextSubmatrix, Examples) {
  ResidencyState s(3);
  s.bins = {1, 2, 4};
  const std::vector<PartPair> pairs{{4, 0}, {4, 1}, {4, 2}, {4, 3}};
  EXPECT_EQ(next_submatrix(s, 0, pairs), std::optional<std::uint32_t>(3));
  EXPECT_EQ(next_submatrix(s, 3, pairs), std::nullopt);
  ResidencyState all(3);
  all.bins = {0, 1, 2};
  const auto rot = rotation_pairs(3);
  for (std::size_t i = 0; i < rot.size(); ++i) EXPECT_EQ(next_submatrix(all, i, rot), std::nullopt);
}

TEST(SwitchSubmatrices, FillEvictAndErrors) {
  ResidencyState s(3);
  s = switch_submatrices(s, kEmptyBin, 0);
  s = switch_submatrices(s, kEmptyBin, 1);
  s = switch_submatrices(s, kEmptyBin, 2);
  EXPECT_EQ(s.bins, (std::vector<int>{0, 1, 2}));
  const ResidencyState t = switch_submatrices(s, 1, 5);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < 3; ++i) diff += s.bins[i] != t.bins[i];
  EXPECT_EQ(diff, 1u);
  EXPECT_TRUE(t.resident(5));
  EXPECT_FALSE(t.resident(1));

  EXPECT_THROW(switch_submatrices(s, kEmptyBin, 3), scheduling_error);   // no empty bin
  EXPECT_THROW(switch_submatrices(s, 0, 2), scheduling_error);           // already resident
  EXPECT_THROW(switch_submatrices(s, 4, 3), scheduling_error);           // evicting a non-resident part
  EXPECT_THROW(switch_submatrices(s, 0, 3, PartPair{2, 0}), scheduling_error);
  EXPECT_NO_THROW(switch_submatrices(s, 1, 3, PartPair{2, 0}));
}

TEST(ResidentSubmatrices, FlushLoadRoundTrip) {
  const PartitionPlan plan(50, 5);
  EmbeddingMatrix m = init_embedding(50, 6, 3);
  const EmbeddingMatrix original = m;
  const auto path = std::filesystem::temp_directory_path() / "gosh_bigtrain_roundtrip.bin";
  for (int mode = 0; mode < 2; ++mode) {
    std::unique_ptr<BackingStore> store;
    if (mode == 0) store = std::make_unique<MemoryBackingStore>(m);
    else store = std::make_unique<FileBackingStore>(m, path);
    FootprintMeter meter(0);
    {
      ResidentSubmatrices resident(plan, 6, 2, *store, meter);
      resident.switch_in(kEmptyBin, 2);
      resident.switch_in(kEmptyBin, 4);
      const auto v = resident.view(2);
      EXPECT_TRUE(std::equal(v.data.begin(), v.data.end(), original.row(20).begin()));
      resident.switch_in(2, 0);
      resident.switch_in(0, 2);
      const auto again = resident.view(2);
      EXPECT_TRUE(std::equal(again.data.begin(), again.data.end(), original.row(20).begin()));
      EXPECT_EQ(resident.switches(), 4u);
      resident.flush_all();
    }
    store->finish();
    EXPECT_EQ(m, original);
  }
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(FootprintMeter, EnforcesCapacity) {
  FootprintMeter meter(100);
  meter.acquire(60);
  EXPECT_THROW(meter.acquire(41), scheduling_error);
  EXPECT_EQ(meter.used(), 60u);
  meter.acquire(40);
  meter.release(70);
  EXPECT_EQ(meter.used(), 30u);
  EXPECT_EQ(meter.peak(), 100u);
}

TEST(SchedulerPolicyProperty, PrefetchNeverEvictsUpcomingPair) {
  for (std::size_t k = 1; k <= 12; ++k) {
    for (std::size_t p = 2; p <= 5; ++p) {
      std::vector<PartPair> schedule;
      for (int r = 0; r < 3; ++r) {
        const auto rot = rotation_pairs(k);
        schedule.insert(schedule.end(), rot.begin(), rot.end());
      }
      ResidencyState state(p);
      for (std::uint32_t part = 0; part < std::min(p, k); ++part) state = switch_submatrices(state, kEmptyBin, part);
      for (std::size_t t = 0; t < schedule.size(); ++t) {
        for (std::uint32_t part : {schedule[t].a, schedule[t].b}) {
          if (state.resident(part)) continue;
          int evict = kEmptyBin;
          if (!state.has_empty_bin()) evict = *detail::furthest_use(state, t, schedule, schedule[t]);
          state = switch_submatrices(state, evict, part, schedule[t]);
        }
        ASSERT_TRUE(state.resident(schedule[t].a) && state.resident(schedule[t].b));
        if (const auto next = next_submatrix(state, t, schedule)) {
          const auto victim = detail::prefetch_victim(state, t, schedule);
          const auto upcoming = t + 1 < schedule.size() ? std::optional(schedule[t + 1]) : std::nullopt;
          if (!victim) {
            // only legal when every bin holds a part of the next pair
            ASSERT_TRUE(upcoming);
            for (int part : state.bins) ASSERT_TRUE(upcoming->involves(static_cast<std::size_t>(part)));
            continue;
          }
          ASSERT_NO_THROW(state = switch_submatrices(state, *victim, *next, upcoming)) << k << ' ' << p << ' ' << t;
        }
      }
    }
  }
}

TEST(RotationCount, Rounding) {
  EXPECT_EQ(rotation_count(0, 1, 5, 3), 0u);
  EXPECT_EQ(rotation_count(1, 1, 5, 3), 1u);
  EXPECT_EQ(rotation_count(150, 1, 5, 3), 10u);
  EXPECT_EQ(rotation_count(150, 2, 5, 3), 20u);
  EXPECT_EQ(rotation_count(157, 1, 5, 3), 10u);
  EXPECT_EQ(rotation_count(158, 1, 5, 3), 11u);
}

TEST(TrainLarge, PositiveUpdatesPerRotationBound) {
  const vertex_id n = 40;
  const Graph g = gen::complete(n);
  TrainConfig cfg;
  cfg.dim = 8;
  const MemoryBudget shape = budget_for(0, 2, 2, 3);
  const MemoryBudget b = budget_for(budget_for_parts(n, cfg.dim, 4, shape), 2, 2, 3);
  EmbeddingMatrix m = init_embedding(n, cfg.dim, 1);
  std::ostringstream log;
  LargeTrainOptions opts;
  opts.log = &log;
  const LargeTrainReport rep = train_large(g, m, cfg, 24, 0.05, b, opts);
  EXPECT_EQ(rep.num_parts, 4u);
  EXPECT_EQ(rep.rotations, 2u);
  EXPECT_EQ(rep.updates.positive, rep.rotations * n * 3 * 4);
  EXPECT_EQ(rep.updates.negative, rep.updates.positive * cfg.negative_samples);
  EXPECT_LE(rep.peak_resident_bytes, b.resident_bytes);
  EXPECT_TRUE(m.all_finite());

  std::istringstream lines(log.str());
  std::string line;
  std::size_t rotations = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["event"], "rotation");
    EXPECT_EQ(j["positive_updates"].get<std::size_t>(), n * 3 * 4);
    ++rotations;
  }
  EXPECT_EQ(rotations, rep.rotations);
}

TEST(TrainLarge, SparseGraphStaysUnderBoundAndBudget) {
  const Graph g = gen::collaboration(gen::dblp_like(3000), 6);
  TrainConfig cfg;
  cfg.dim = 16;
  cfg.num_workers = 2;
  for (std::size_t k : {3u, 5u, 9u}) {
    const MemoryBudget b = budget_for(budget_for_parts(g.num_vertices(), cfg.dim, k, budget_for(0)));
    EmbeddingMatrix m = init_embedding(g.num_vertices(), cfg.dim, 1);
    const LargeTrainReport rep = train_large(g, m, cfg, 30, 0.05, b);
    EXPECT_EQ(rep.num_parts, k);
    EXPECT_LE(rep.updates.positive, rep.rotations * g.num_vertices() * b.batch_size * k);
    EXPECT_GT(rep.updates.positive, 0u);
    EXPECT_LE(rep.peak_resident_bytes, b.resident_bytes);
    EXPECT_TRUE(m.all_finite());
    if (k > 3) {
      EXPECT_GT(rep.switches, 3u);
    }
  }
}

TEST(TrainLarge, DeterministicAndFileBackedMatchesMemory) {
  const Graph g = gen::collaboration(gen::dblp_like(2000), 6);
  TrainConfig cfg;
  cfg.dim = 8;
  MemoryBudget b = budget_for(budget_for_parts(g.num_vertices(), cfg.dim, 5, budget_for(0)));
  EmbeddingMatrix a = init_embedding(g.num_vertices(), cfg.dim, 1), c = a, f = a;
  train_large(g, a, cfg, 20, 0.05, b);
  train_large(g, c, cfg, 20, 0.05, b);
  EXPECT_EQ(a, c);
  b.backing_file = (std::filesystem::temp_directory_path() / "gosh_train_large.bin").string();
  train_large(g, f, cfg, 20, 0.05, b);
  EXPECT_EQ(a, f);
  EXPECT_FALSE(std::filesystem::exists(b.backing_file));
}

TEST(TrainLarge, ZeroEpochsIsNoOp) {
  const Graph g = gen::cycle(30);
  EmbeddingMatrix m = init_embedding(30, 4, 1);
  const EmbeddingMatrix before = m;
  const LargeTrainReport rep = train_large(g, m, TrainConfig{}, 0, 0.05, MemoryBudget{});
  EXPECT_EQ(rep.rotations, 0u);
  EXPECT_EQ(m, before);
}

TEST(TrainMultilevel, SmallBudgetPartitionsLargeLevels) {
  const Graph g = gen::collaboration(gen::dblp_like(4000), 7);
  TrainConfig cfg;
  cfg.dim = 16;
  cfg.total_epochs = 60;
  const std::size_t level0 = g.num_vertices() * cfg.dim * sizeof(float) + g.footprint_bytes();
  const MemoryBudget b = budget_for(level0 / 2);
  std::ostringstream log;
  const MultilevelResult res = train_multilevel(g, cfg, b, &log);
  ASSERT_GE(res.levels.size(), 2u);
  EXPECT_TRUE(res.levels.back().partitioned);
  EXPECT_GE(res.levels.back().num_parts, 3u);
  EXPECT_FALSE(res.levels.front().partitioned);
  EXPECT_TRUE(res.embedding.all_finite());
  EXPECT_NE(log.str().find("\"rotation\""), std::string::npos);
}

TEST(BoundedQueue, OrderCapacityAndClose) {
  BoundedQueue<int> q(2);
  std::vector<int> got;
  std::jthread consumer([&] {
    while (auto v = q.pop()) got.push_back(*v);
  });
  for (int i = 0; i < 100; ++i) {
    ASSERT_TRUE(q.push(i));
    EXPECT_LE(q.size(), 2u);
  }
  q.close();
  consumer.join();
  std::vector<int> expect(100);
  std::iota(expect.begin(), expect.end(), 0);
  EXPECT_EQ(got, expect);
  EXPECT_FALSE(q.push(5));

  BoundedQueue<int> full(1);
  full.push(1);
  std::jthread blocked([&] { EXPECT_FALSE(full.push(2)); });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  full.close();
}

TEST(SlotGate, LimitsAndCloses) {
  SlotGate gate(2);
  EXPECT_TRUE(gate.acquire());
  EXPECT_TRUE(gate.acquire());
  std::jthread waiter([&] { EXPECT_TRUE(gate.acquire()); });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  gate.release();
  waiter.join();
  std::jthread closed([&] { EXPECT_FALSE(gate.acquire()); });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  gate.close();
}

}  // namespace
}  // namespace gosh
