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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gosh/bounded_queue.hpp"
#include "gosh/config.hpp"
#include "gosh/embedding.hpp"
#include "gosh/error.hpp"
#include "gosh/graph.hpp"
#include "gosh/kernels.hpp"
#include "gosh/parallel.hpp"
#include "gosh/random.hpp"
#include "gosh/schedule.hpp"
#include "gosh/trainer.hpp"

namespace gosh {

// ---------------------------------------------------------------------------
// Partitioning

// K contiguous vertex ranges whose sizes differ by at most one.
class PartitionPlan {
 public:
  PartitionPlan() = default;
  PartitionPlan(std::size_t num_rows, std::size_t num_parts) : num_rows_(num_rows), parts_(num_parts) {
    if (num_parts == 0) throw plan_error("partition needs at least one part");
    boundaries_.resize(num_parts + 1);
    const std::size_t q = num_rows / num_parts;
    const std::size_t r = num_rows % num_parts;
    for (std::size_t j = 0; j <= num_parts; ++j) boundaries_[j] = j * q + std::min(j, r);
  }

  std::size_t num_parts() const noexcept { return parts_; }
  std::size_t num_rows() const noexcept { return num_rows_; }
  std::span<const std::size_t> boundaries() const noexcept { return boundaries_; }
  std::size_t begin(std::size_t part) const noexcept { return boundaries_[part]; }
  std::size_t end(std::size_t part) const noexcept { return boundaries_[part + 1]; }
  std::size_t size(std::size_t part) const noexcept { return end(part) - begin(part); }
  std::size_t max_part_rows() const noexcept { return parts_ == 0 ? 0 : size(0); }

  std::size_t part_of(std::size_t v) const noexcept {
    const std::size_t q = num_rows_ / parts_;
    const std::size_t r = num_rows_ % parts_;
    const std::size_t big = r * (q + 1);
    return v < big ? v / (q + 1) : r + (v - big) / q;
  }

 private:
  std::size_t num_rows_ = 0;
  std::size_t parts_ = 0;
  std::vector<std::size_t> boundaries_;
};

// Bytes of one pool for a cross pair of parts with `part_rows` rows each.
inline std::size_t pool_bytes(std::size_t part_rows, std::size_t batch) noexcept {
  return 2 * part_rows * batch * sizeof(vertex_id);
}

// Resident bytes with K parts: P sub-matrix bins plus S staged pools.
inline std::size_t resident_footprint(std::size_t num_rows, std::size_t dim, std::size_t num_parts,
                                      const MemoryBudget& budget) noexcept {
  const std::size_t part_rows = (num_rows + num_parts - 1) / num_parts;
  return budget.parts_resident * part_rows * dim * sizeof(float) +
         budget.pools_resident * pool_bytes(part_rows, budget.batch_size);
}

// Smallest K >= P whose resident footprint fits the budget. An unlimited
// budget gives K = P.
inline PartitionPlan plan_partitions(std::size_t num_rows, std::size_t dim, const MemoryBudget& budget) {
  budget.validate();
  const std::size_t p = budget.parts_resident;
  if (budget.unlimited()) return PartitionPlan(num_rows, p);
  auto fits = [&](std::size_t k) { return resident_footprint(num_rows, dim, k, budget) <= budget.resident_bytes; };
  std::size_t hi = std::max(p, num_rows);
  if (!fits(hi))
    throw plan_error("resident budget of " + std::to_string(budget.resident_bytes) +
                     " bytes cannot hold " + std::to_string(p) + " single-row parts and their pools");
  std::size_t lo = p;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (fits(mid)) hi = mid;
    else lo = mid + 1;
  }
  return PartitionPlan(num_rows, lo);
}

// ---------------------------------------------------------------------------
// Rotation order

struct PartPair {
  std::uint32_t a = 0;  // a >= b
  std::uint32_t b = 0;

  friend constexpr bool operator==(const PartPair&, const PartPair&) = default;
  bool diagonal() const noexcept { return a == b; }
  bool involves(std::size_t part) const noexcept { return a == part || b == part; }
};

// Inside-out order: (0,0); after (a,b) with a>b comes (a,b+1); after (a,a)
// comes (a+1,0). K(K+1)/2 pairs.
inline std::vector<PartPair> rotation_pairs(std::size_t num_parts) {
  std::vector<PartPair> out;
  if (num_parts == 0) return out;
  out.reserve(num_parts * (num_parts + 1) / 2);
  PartPair cur{0, 0};
  out.push_back(cur);
  while (out.size() < num_parts * (num_parts + 1) / 2) {
    if (cur.a > cur.b) cur = {cur.a, cur.b + 1};
    else cur = {cur.a + 1, 0};
    out.push_back(cur);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sample pools

// Positive targets for one part pair. first_targets holds `batch` slots per
// vertex of part a, all pointing into part b; second_targets is the reverse
// direction and stays empty for diagonal pairs. Ids are global; kNoVertex
// marks an absent slot.
struct SamplePool {
  PartPair pair;
  std::size_t batch = 0;
  std::size_t first_begin = 0;
  std::size_t first_size = 0;
  std::size_t second_begin = 0;
  std::size_t second_size = 0;
  std::vector<vertex_id> first_targets;
  std::vector<vertex_id> second_targets;

  std::size_t bytes() const noexcept {
    return (first_targets.size() + second_targets.size()) * sizeof(vertex_id);
  }
};

namespace detail {

// Neighbors of v inside [lo, hi); adjacency is sorted so this is a subrange.
inline std::span<const vertex_id> neighbors_in_range(const Graph& g, vertex_id v, std::size_t lo, std::size_t hi) {
  const auto nb = g.neighbors(v);
  const auto first = std::lower_bound(nb.begin(), nb.end(), static_cast<vertex_id>(lo));
  const auto last = std::lower_bound(first, nb.end(), hi >= kNoVertex ? kNoVertex : static_cast<vertex_id>(hi));
  return nb.subspan(static_cast<std::size_t>(first - nb.begin()), static_cast<std::size_t>(last - first));
}

inline void fill_targets(const Graph& g, std::size_t src_begin, std::size_t src_size, std::size_t dst_begin,
                         std::size_t dst_end, std::size_t batch, std::uint64_t seed, std::uint64_t side,
                         unsigned workers, std::vector<vertex_id>& out) {
  out.assign(src_size * batch, kNoVertex);
  parallel_for_dynamic(src_size, 1024, workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto v = static_cast<vertex_id>(src_begin + i);
      const auto cand = neighbors_in_range(g, v, dst_begin, dst_end);
      if (cand.empty()) continue;
      Rng rng{seed, side, v};
      for (std::size_t s = 0; s < batch; ++s) out[i * batch + s] = cand[rng.below(cand.size())];
    }
  });
}

}  // namespace detail

inline SamplePool build_sample_pool(const Graph& g, const PartitionPlan& plan, PartPair pair, std::size_t batch,
                                    std::uint64_t seed, unsigned workers = 1) {
  if (pair.a >= plan.num_parts() || pair.b >= plan.num_parts()) throw plan_error("pair outside partition");
  SamplePool pool;
  pool.pair = pair;
  pool.batch = batch;
  pool.first_begin = plan.begin(pair.a);
  pool.first_size = plan.size(pair.a);
  pool.second_begin = plan.begin(pair.b);
  pool.second_size = plan.size(pair.b);
  detail::fill_targets(g, pool.first_begin, pool.first_size, plan.begin(pair.b), plan.end(pair.b), batch, seed, 0,
                       workers, pool.first_targets);
  if (!pair.diagonal())
    detail::fill_targets(g, pool.second_begin, pool.second_size, plan.begin(pair.a), plan.end(pair.a), batch, seed,
                         1, workers, pool.second_targets);
  return pool;
}

// ---------------------------------------------------------------------------
// Pair training

// Rows [begin, begin + rows) of the full matrix, held in a resident bin.
struct SubMatrixView {
  std::size_t begin = 0;
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::span<float> data;

  std::span<float> row(std::size_t local) const noexcept { return data.subspan(local * dim, dim); }
};

namespace detail {

inline UpdateCounters train_direction(const SubMatrixView& src, const SubMatrixView& dst,
                                      std::span<const vertex_id> targets, std::size_t batch, std::size_t negatives,
                                      float lr, std::uint64_t seed, std::uint64_t side, unsigned workers,
                                      UpdateRule rule) {
  const unsigned w = resolve_workers(workers);
  std::vector<UpdateCounters> per_worker(w);
  parallel_for_dynamic(src.rows, kTrainBatch, w, [&](std::size_t begin, std::size_t end, unsigned worker) {
    UpdateCounters local;
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng{seed, side, src.begin + i};
      const auto row = src.row(i);
      for (std::size_t s = 0; s < batch; ++s) {
        const vertex_id t = targets[i * batch + s];
        if (t == kNoVertex) continue;
        nce_update<float>(row, dst.row(t - dst.begin), 1.0f, lr, rule);
        for (std::size_t k = 0; k < negatives; ++k)
          nce_update<float>(row, dst.row(rng.below(dst.rows)), 0.0f, lr, rule);
        ++local.positive;
        local.negative += negatives;
      }
    }
    per_worker[worker] += local;
  });
  UpdateCounters total;
  for (const auto& c : per_worker) total += c;
  return total;
}

}  // namespace detail

// Trains one part pair: every source of part a runs its pooled positives
// against part b with `negatives` uniform noise rows from part b per positive,
// then the same for part b against part a. Only rows of the two parts move.
inline UpdateCounters train_pair(const SubMatrixView& first, const SubMatrixView& second, const SamplePool& pool,
                                 std::size_t negatives, float lr, std::uint64_t seed, unsigned workers = 1,
                                 UpdateRule rule = UpdateRule::kSnapshot) {
  if (first.begin != pool.first_begin || first.rows != pool.first_size || second.begin != pool.second_begin ||
      second.rows != pool.second_size)
    throw scheduling_error("sub-matrices do not match the sample pool");
  UpdateCounters total = detail::train_direction(first, second, pool.first_targets, pool.batch, negatives, lr, seed,
                                                 0, workers, rule);
  if (!pool.pair.diagonal())
    total += detail::train_direction(second, first, pool.second_targets, pool.batch, negatives, lr, seed, 1,
                                     workers, rule);
  return total;
}

// ---------------------------------------------------------------------------
// Residency

inline constexpr int kEmptyBin = -1;

struct ResidencyState {
  std::vector<int> bins;  // part id per bin, kEmptyBin when free

  explicit ResidencyState(std::size_t num_bins = 0) : bins(num_bins, kEmptyBin) {}

  std::optional<std::size_t> bin_of(std::size_t part) const noexcept {
    for (std::size_t i = 0; i < bins.size(); ++i)
      if (bins[i] == static_cast<int>(part)) return i;
    return std::nullopt;
  }
  bool resident(std::size_t part) const noexcept { return bin_of(part).has_value(); }
  bool has_empty_bin() const noexcept {
    return std::find(bins.begin(), bins.end(), kEmptyBin) != bins.end();
  }
  friend bool operator==(const ResidencyState&, const ResidencyState&) = default;
};

// First part, scanning pairs after `position`, that is not resident.
inline std::optional<std::uint32_t> next_submatrix(const ResidencyState& state, std::size_t position,
                                                   std::span<const PartPair> pairs) {
  for (std::size_t i = position + 1; i < pairs.size(); ++i) {
    if (!state.resident(pairs[i].a)) return pairs[i].a;
    if (!state.resident(pairs[i].b)) return pairs[i].b;
  }
  return std::nullopt;
}

// Pure state transition: `admit` takes the bin of `evict` (or an empty bin
// when evict is kEmptyBin). Evicting a part of the in-flight pair is a
// scheduling bug.
inline ResidencyState switch_submatrices(ResidencyState state, int evict, std::uint32_t admit,
                                         std::optional<PartPair> in_flight = std::nullopt) {
  if (state.resident(admit)) throw scheduling_error("part " + std::to_string(admit) + " is already resident");
  std::optional<std::size_t> bin;
  if (evict == kEmptyBin) {
    const auto it = std::find(state.bins.begin(), state.bins.end(), kEmptyBin);
    if (it == state.bins.end()) throw scheduling_error("no empty bin to admit into");
    bin = static_cast<std::size_t>(it - state.bins.begin());
  } else {
    if (in_flight && in_flight->involves(static_cast<std::size_t>(evict)))
      throw scheduling_error("evicting part " + std::to_string(evict) + " needed by the in-flight pair");
    bin = state.bin_of(static_cast<std::size_t>(evict));
    if (!bin) throw scheduling_error("evicting part " + std::to_string(evict) + " that is not resident");
  }
  state.bins[*bin] = static_cast<int>(admit);
  return state;
}

// Where non-resident rows live.
class BackingStore {
 public:
  virtual ~BackingStore() = default;
  virtual void load(std::size_t first_row, std::span<float> dst) = 0;
  virtual void store(std::size_t first_row, std::span<const float> src) = 0;
  // Makes the host matrix current.
  virtual void finish() {}
};

class MemoryBackingStore final : public BackingStore {
 public:
  explicit MemoryBackingStore(EmbeddingMatrix& m) : m_(m) {}
  void load(std::size_t first_row, std::span<float> dst) override {
    std::copy_n(m_.data().begin() + static_cast<std::ptrdiff_t>(first_row * m_.dim()), dst.size(), dst.begin());
  }
  void store(std::size_t first_row, std::span<const float> src) override {
    std::copy(src.begin(), src.end(), m_.data().begin() + static_cast<std::ptrdiff_t>(first_row * m_.dim()));
  }

 private:
  EmbeddingMatrix& m_;
};

// Keeps the matrix in a file while training; finish() reads it back and
// removes the file.
class FileBackingStore final : public BackingStore {
 public:
  FileBackingStore(EmbeddingMatrix& m, std::filesystem::path path) : m_(m), path_(std::move(path)) {
    {
      std::ofstream out(path_, std::ios::binary | std::ios::trunc);
      out.write(reinterpret_cast<const char*>(m_.data().data()), static_cast<std::streamsize>(m_.footprint_bytes()));
      if (!out) throw error("cannot write backing file " + path_.string());
    }
    file_.open(path_, std::ios::binary | std::ios::in | std::ios::out);
    if (!file_) throw error("cannot open backing file " + path_.string());
  }
  ~FileBackingStore() override {
    file_.close();
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }

  void load(std::size_t first_row, std::span<float> dst) override {
    file_.seekg(static_cast<std::streamoff>(first_row * m_.dim() * sizeof(float)));
    if (!file_.read(reinterpret_cast<char*>(dst.data()), static_cast<std::streamsize>(dst.size_bytes())))
      throw error("short read from backing file");
  }
  void store(std::size_t first_row, std::span<const float> src) override {
    file_.seekp(static_cast<std::streamoff>(first_row * m_.dim() * sizeof(float)));
    if (!file_.write(reinterpret_cast<const char*>(src.data()), static_cast<std::streamsize>(src.size_bytes())))
      throw error("short write to backing file");
  }
  void finish() override {
    file_.flush();
    file_.seekg(0);
    if (!file_.read(reinterpret_cast<char*>(m_.data().data()), static_cast<std::streamsize>(m_.footprint_bytes())))
      throw error("short read from backing file");
  }

 private:
  EmbeddingMatrix& m_;
  std::filesystem::path path_;
  std::fstream file_;
};

// Byte accounting for everything resident. Exceeding the capacity throws.
class FootprintMeter {
 public:
  explicit FootprintMeter(std::size_t capacity) : capacity_(capacity) {}

  void acquire(std::size_t bytes) {
    const std::size_t now = used_.fetch_add(bytes) + bytes;
    if (capacity_ != 0 && now > capacity_) {
      used_.fetch_sub(bytes);
      throw scheduling_error("resident footprint " + std::to_string(now) + " exceeds budget " +
                             std::to_string(capacity_));
    }
    std::size_t peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
  }
  void release(std::size_t bytes) noexcept { used_.fetch_sub(bytes); }

  std::size_t used() const noexcept { return used_.load(); }
  std::size_t peak() const noexcept { return peak_.load(); }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t capacity_;
  std::atomic<std::size_t> used_{0};
  std::atomic<std::size_t> peak_{0};
};

// P fixed-size bins holding sub-matrices, backed by a BackingStore.
class ResidentSubmatrices {
 public:
  ResidentSubmatrices(const PartitionPlan& plan, std::size_t dim, std::size_t num_bins, BackingStore& store,
                      FootprintMeter& meter)
      : plan_(plan), dim_(dim), state_(num_bins), store_(store), meter_(meter),
        bin_rows_(plan.max_part_rows()) {
    meter_.acquire(num_bins * bin_rows_ * dim_ * sizeof(float));
    storage_.resize(num_bins);
    for (auto& s : storage_) s.assign(bin_rows_ * dim_, 0.0f);
  }
  ~ResidentSubmatrices() { meter_.release(storage_.size() * bin_rows_ * dim_ * sizeof(float)); }

  ResidentSubmatrices(const ResidentSubmatrices&) = delete;
  ResidentSubmatrices& operator=(const ResidentSubmatrices&) = delete;

  const ResidencyState& state() const noexcept { return state_; }
  std::size_t switches() const noexcept { return switches_; }

  void switch_in(int evict, std::uint32_t admit, std::optional<PartPair> in_flight = std::nullopt) {
    ResidencyState next = switch_submatrices(state_, evict, admit, in_flight);
    const std::size_t bin = *next.bin_of(admit);
    if (evict != kEmptyBin) flush_bin(bin, static_cast<std::size_t>(evict));
    store_.load(plan_.begin(admit), bin_span(bin, admit));
    state_ = std::move(next);
    ++switches_;
  }

  SubMatrixView view(std::size_t part) {
    const auto bin = state_.bin_of(part);
    if (!bin) throw scheduling_error("part " + std::to_string(part) + " is not resident");
    return {plan_.begin(part), plan_.size(part), dim_, bin_span(*bin, part)};
  }

  void flush_all() {
    for (std::size_t bin = 0; bin < state_.bins.size(); ++bin)
      if (state_.bins[bin] != kEmptyBin) flush_bin(bin, static_cast<std::size_t>(state_.bins[bin]));
  }

 private:
  std::span<float> bin_span(std::size_t bin, std::size_t part) {
    return std::span<float>(storage_[bin]).first(plan_.size(part) * dim_);
  }
  void flush_bin(std::size_t bin, std::size_t part) { store_.store(plan_.begin(part), bin_span(bin, part)); }

  const PartitionPlan& plan_;
  std::size_t dim_;
  ResidencyState state_;
  BackingStore& store_;
  FootprintMeter& meter_;
  std::size_t bin_rows_;
  std::vector<std::vector<float>> storage_;
  std::size_t switches_ = 0;
};

// ---------------------------------------------------------------------------
// Orchestration

struct LargeTrainReport {
  std::size_t num_parts = 0;
  std::size_t rotations = 0;
  std::size_t switches = 0;
  std::size_t on_demand_loads = 0;
  std::size_t peak_resident_bytes = 0;
  UpdateCounters updates;
  double elapsed_ms = 0.0;
};

struct LargeTrainOptions {
  std::size_t level = 0;
  std::ostream* log = nullptr;  // one JSON line per rotation
};

// Rotations for a level: each rotation is worth about B*K vertex passes.
inline std::size_t rotation_count(std::size_t level_epochs, std::size_t passes, std::size_t batch,
                                  std::size_t num_parts) noexcept {
  if (level_epochs == 0) return 0;
  const double r = static_cast<double>(level_epochs * passes) / static_cast<double>(batch * num_parts);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(r)));
}

namespace detail {

// Resident part outside `keep` whose next use after `pos` is furthest away.
inline std::optional<int> furthest_use(const ResidencyState& state, std::size_t pos,
                                       std::span<const PartPair> schedule, std::optional<PartPair> keep) {
  std::optional<int> best;
  std::size_t best_dist = 0;
  for (int part : state.bins) {
    if (part == kEmptyBin || (keep && keep->involves(static_cast<std::size_t>(part)))) continue;
    std::size_t dist = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = pos + 1; i < schedule.size(); ++i)
      if (schedule[i].involves(static_cast<std::size_t>(part))) {
        dist = i;
        break;
      }
    if (!best || dist > best_dist) {
      best = part;
      best_dist = dist;
    }
  }
  return best;
}

// Bin to give up for a prefetch after pair `pos` finishes: an empty bin, else
// the finished pair's second part unless the next pair needs it, else the
// part used furthest in the future.
inline std::optional<int> prefetch_victim(const ResidencyState& state, std::size_t pos,
                                          std::span<const PartPair> schedule) {
  if (state.has_empty_bin()) return kEmptyBin;
  const std::optional<PartPair> upcoming =
      pos + 1 < schedule.size() ? std::optional<PartPair>(schedule[pos + 1]) : std::nullopt;
  const std::uint32_t done = schedule[pos].b;
  if (!upcoming || !upcoming->involves(done)) return static_cast<int>(done);
  return furthest_use(state, pos, schedule, upcoming);
}

}  // namespace detail

// Partitioned training of one level within `budget`. Three roles run
// concurrently: a sample manager builds pools in schedule order, a pool
// dispatcher stages at most S of them as resident, and the calling thread
// trains each pair once both of its sub-matrices and its pool are resident,
// prefetching the next needed sub-matrix after every pair.
inline LargeTrainReport train_large(const Graph& g, EmbeddingMatrix& m, const TrainConfig& cfg,
                                    std::size_t level_epochs, double lr0, const MemoryBudget& budget,
                                    const LargeTrainOptions& opts = {}) {
  if (m.rows() != g.num_vertices()) throw dimension_error("embedding rows do not match graph vertices");
  const auto t_start = std::chrono::steady_clock::now();
  const PartitionPlan plan = plan_partitions(m.rows(), m.dim(), budget);
  const std::size_t k = plan.num_parts();
  const std::size_t batch = budget.batch_size;
  const std::size_t rotations = rotation_count(level_epochs, passes_per_epoch(g, cfg.epoch_unit), batch, k);
  const std::vector<PartPair> per_rotation = rotation_pairs(k);
  std::vector<PartPair> schedule;
  schedule.reserve(rotations * per_rotation.size());
  for (std::size_t r = 0; r < rotations; ++r) schedule.insert(schedule.end(), per_rotation.begin(), per_rotation.end());

  LargeTrainReport report;
  report.num_parts = k;
  report.rotations = rotations;
  if (schedule.empty()) return report;

  std::unique_ptr<BackingStore> store;
  if (budget.backing_file.empty()) store = std::make_unique<MemoryBackingStore>(m);
  else store = std::make_unique<FileBackingStore>(m, budget.backing_file);

  FootprintMeter meter(budget.resident_bytes);
  const unsigned workers = resolve_workers(cfg.num_workers);
  const std::uint64_t pool_seed = derive_seed({cfg.seed, 0x9001u, opts.level});
  const std::uint64_t neg_seed = derive_seed({cfg.seed, 0x9002u, opts.level});

  {
    ResidentSubmatrices resident(plan, m.dim(), budget.parts_resident, *store, meter);
    for (std::uint32_t part = 0; part < std::min(budget.parts_resident, k); ++part) resident.switch_in(kEmptyBin, part);

    BoundedQueue<SamplePool> ready(budget.pools_resident);
    BoundedQueue<SamplePool> staged(budget.pools_resident);
    SlotGate slots(budget.pools_resident);
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto fail = [&](std::exception_ptr e) {
      {
        std::lock_guard lk(failure_mu);
        if (!failure) failure = e;
      }
      ready.close();
      staged.close();
      slots.close();
    };

    {
      std::jthread sample_manager([&] {
        try {
          for (std::size_t t = 0; t < schedule.size(); ++t)
            if (!ready.push(build_sample_pool(g, plan, schedule[t], batch, derive_seed({pool_seed, t}), workers)))
              return;
          ready.close();
        } catch (...) {
          fail(std::current_exception());
        }
      });
      std::jthread pool_dispatcher([&] {
        try {
          while (auto pool = ready.pop()) {
            if (!slots.acquire()) return;
            meter.acquire(pool->bytes());
            if (!staged.push(std::move(*pool))) return;
          }
          staged.close();
        } catch (...) {
          fail(std::current_exception());
        }
      });

      try {
        auto rotation_start = std::chrono::steady_clock::now();
        std::size_t rotation_switches = resident.switches();
        UpdateCounters rotation_updates;
        for (std::size_t t = 0; t < schedule.size(); ++t) {
          const PartPair pair = schedule[t];
          const std::size_t rotation = t / per_rotation.size();
          auto pool = staged.pop();
          if (!pool) break;
          if (!(pool->pair == pair)) throw scheduling_error("sample pool arrived out of order");

          // prefetch normally covers this; load on demand otherwise
          for (std::uint32_t part : {pair.a, pair.b}) {
            if (resident.state().resident(part)) continue;
            int evict = kEmptyBin;
            if (!resident.state().has_empty_bin()) {
              const auto victim = detail::furthest_use(resident.state(), t, schedule, pair);
              if (!victim) throw scheduling_error("no evictable bin for pair");
              evict = *victim;
            }
            resident.switch_in(evict, part, pair);
            ++report.on_demand_loads;
          }
          if (!resident.state().resident(pair.a) || !resident.state().resident(pair.b))
            throw scheduling_error("pair trained without both sub-matrices resident");

          const float lr = static_cast<float>(lr_at(lr0, rotation, rotations));
          rotation_updates += train_pair(resident.view(pair.a), resident.view(pair.b), *pool, cfg.negative_samples,
                                         lr, derive_seed({neg_seed, t}), workers, cfg.update_rule);
          meter.release(pool->bytes());
          pool.reset();
          slots.release();

          if (const auto next = next_submatrix(resident.state(), t, schedule)) {
            if (const auto victim = detail::prefetch_victim(resident.state(), t, schedule)) {
              const auto upcoming = t + 1 < schedule.size() ? std::optional(schedule[t + 1]) : std::nullopt;
              resident.switch_in(*victim, *next, upcoming);
            }
          }

          const bool rotation_done = (t + 1) % per_rotation.size() == 0;
          if (rotation_done) {
            report.updates += rotation_updates;
            if (opts.log) {
              const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                          rotation_start).count();
              nlohmann::json line{{"event", "rotation"},
                                  {"level", opts.level},
                                  {"rotation", rotation},
                                  {"parts", k},
                                  {"pairs", per_rotation.size()},
                                  {"elapsed_ms", ms},
                                  {"switches", resident.switches() - rotation_switches},
                                  {"positive_updates", rotation_updates.positive},
                                  {"negative_updates", rotation_updates.negative}};
              *opts.log << line.dump() << '\n';
            }
            rotation_updates = {};
            rotation_switches = resident.switches();
            rotation_start = std::chrono::steady_clock::now();
          }
        }
      } catch (...) {
        fail(std::current_exception());
      }
    }
    if (failure) std::rethrow_exception(failure);
    resident.flush_all();
    report.switches = resident.switches();
  }
  store->finish();
  report.peak_resident_bytes = meter.peak();
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace gosh
