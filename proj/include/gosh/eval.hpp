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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "gosh/config.hpp"
#include "gosh/embedding.hpp"
#include "gosh/error.hpp"
#include "gosh/graph.hpp"
#include "gosh/kernels.hpp"
#include "gosh/multilevel.hpp"
#include "gosh/parallel.hpp"
#include "gosh/random.hpp"
#include "gosh/split.hpp"

namespace gosh {

struct FeatureSet {
  std::size_t dim = 0;
  std::vector<float> rows;  // size() x dim, row-major
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const float> row(std::size_t i) const noexcept { return {rows.data() + i * dim, dim}; }
};

// Row i is M[u_i] * M[v_i] component-wise.
inline FeatureSet hadamard_features(const EmbeddingMatrix& m, std::span<const Edge> pairs,
                                    std::span<const std::uint8_t> labels, unsigned workers = 1) {
  if (pairs.size() != labels.size()) throw dimension_error("pairs and labels differ in length");
  for (const Edge& e : pairs)
    if (e.u >= m.rows() || e.v >= m.rows()) throw dimension_error("pair endpoint outside embedding");
  FeatureSet f;
  f.dim = m.dim();
  f.rows.resize(pairs.size() * f.dim);
  f.labels.assign(labels.begin(), labels.end());
  parallel_for_dynamic(pairs.size(), 4096, workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto a = m.row(pairs[i].u);
      const auto b = m.row(pairs[i].v);
      float* out = f.rows.data() + i * f.dim;
      for (std::size_t j = 0; j < f.dim; ++j) out[j] = a[j] * b[j];
    }
  });
  return f;
}

namespace detail {

inline std::uint64_t pair_key(vertex_id u, vertex_id v) noexcept {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace detail

// `count` uniformly drawn vertex pairs (u != v) that are not arcs of g and not
// in `exclude`. Pairs may repeat. Small graphs with few non-edges are handled
// by enumeration.
inline std::vector<Edge> sample_negative_edges(const Graph& g, std::size_t count, std::uint64_t seed,
                                               std::span<const Edge> exclude = {}) {
  const std::uint64_t n = g.num_vertices();
  std::unordered_set<std::uint64_t> banned;
  banned.reserve(exclude.size() * 2);
  for (const Edge& e : exclude) banned.insert(detail::pair_key(e.u, e.v));
  auto allowed = [&](vertex_id u, vertex_id v) {
    return u != v && !g.has_arc(u, v) && !g.has_arc(v, u) && !banned.contains(detail::pair_key(u, v));
  };

  std::vector<Edge> out;
  if (count == 0) return out;
  const std::uint64_t all_pairs = n < 2 ? 0 : n * (n - 1) / 2;
  // upper bound on the banned unordered pairs
  const std::uint64_t taken = std::min<std::uint64_t>(all_pairs, g.num_edges() + banned.size());
  Rng rng{seed, 0x4e6u};
  if (all_pairs - taken < 4 * count || all_pairs <= (1u << 20)) {
    // exact: enumerate every admissible pair
    std::vector<Edge> pool;
    for (vertex_id u = 0; u < n; ++u)
      for (vertex_id v = u + 1; v < n; ++v)
        if (allowed(u, v)) pool.push_back({u, v});
    if (pool.empty()) throw sampling_error("graph has no non-edges to sample");
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(pool[rng.below(pool.size())]);
    return out;
  }
  out.reserve(count);
  while (out.size() < count) {
    const auto u = static_cast<vertex_id>(rng.below(n));
    const auto v = static_cast<vertex_id>(rng.below(n));
    if (allowed(u, v)) out.push_back({u, v});
  }
  return out;
}

struct LogRegHyper {
  std::size_t epochs = 100;
  double step = 0.1;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;

  static LogRegHyper standard() { return {}; }
  // Single pass of plain SGD for graphs where the full fit is too expensive.
  static LogRegHyper large_graph() { return {1, 0.1, 1, 0}; }
};

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  LogRegHyper hyper;

  double decision(std::span<const float> x) const noexcept {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
    return z;
  }
  double probability(std::span<const float> x) const noexcept { return 1.0 / (1.0 + std::exp(-decision(x))); }
};

// Unregularized logistic regression by shuffled mini-batch gradient descent.
inline LogRegModel train_logreg(const FeatureSet& f, const LogRegHyper& hyper = {}) {
  const std::size_t n = f.size();
  const std::size_t pos = static_cast<std::size_t>(std::count(f.labels.begin(), f.labels.end(), 1));
  if (pos == 0 || pos == n) throw sampling_error("logistic regression needs both classes");
  LogRegModel model;
  model.hyper = hyper;
  model.weights.assign(f.dim, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(f.dim);
  const std::size_t batch = std::max<std::size_t>(1, hyper.batch_size);
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng rng{hyper.seed, 0x106u, epoch};
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    for (std::size_t b = 0; b < n; b += batch) {
      const std::size_t e = std::min(n, b + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_bias = 0.0;
      for (std::size_t k = b; k < e; ++k) {
        const auto x = f.row(order[k]);
        const double err = model.probability(x) - static_cast<double>(f.labels[order[k]]);
        for (std::size_t j = 0; j < f.dim; ++j) grad[j] += err * x[j];
        grad_bias += err;
      }
      const double scale = hyper.step / static_cast<double>(e - b);
      for (std::size_t j = 0; j < f.dim; ++j) model.weights[j] -= scale * grad[j];
      model.bias -= scale * grad_bias;
    }
  }
  return model;
}

// Area under the ROC curve via the Mann-Whitney rank statistic; tied scores
// share their mean rank.
inline double auc_roc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw dimension_error("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k)
      if (labels[idx[k]]) {
        pos_rank_sum += mid_rank;
        ++pos;
      }
    i = j;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw sampling_error("AUCROC needs both classes");
  const double p = static_cast<double>(pos);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

struct EvalOptions {
  double test_fraction = 0.2;
  LogRegHyper classifier = LogRegHyper::standard();
  bool skip_training = false;     // score a random embedding (chance baseline)
  std::ostream* scores_csv = nullptr;  // u,v,score,label for the test set
  std::ostream* log = nullptr;
};

struct EvalReport {
  double aucroc = 0.0;
  std::size_t train_positive = 0;
  std::size_t train_negative = 0;
  std::size_t test_positive = 0;
  std::size_t test_negative = 0;
  vertex_id train_vertices = 0;
  edge_offset train_edges = 0;
  double split_ms = 0.0;
  double coarsen_ms = 0.0;
  double embed_ms = 0.0;
  double classify_ms = 0.0;
  std::size_t levels = 0;
  std::vector<LevelReport> level_reports;  // coarsest level first
  std::uint64_t eval_seed = 0;
  TrainConfig config;
};

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"dim", c.dim},
          {"epochs", c.total_epochs},
          {"smoothing", c.smoothing_ratio},
          {"lr", c.learning_rate},
          {"neg", c.negative_samples},
          {"seed", c.seed},
          {"workers", c.num_workers},
          {"epoch_unit", std::string(to_string(c.epoch_unit))},
          {"threshold", c.coarsening_threshold},
          {"coarsen", c.coarsen},
          {"update_rule", std::string(to_string(c.update_rule))}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  return {{"aucroc", r.aucroc},
          {"train_positive", r.train_positive},
          {"train_negative", r.train_negative},
          {"test_positive", r.test_positive},
          {"test_negative", r.test_negative},
          {"train_vertices", r.train_vertices},
          {"train_edges", r.train_edges},
          {"levels", r.levels},
          {"level_reports", [&] {
             nlohmann::json a = nlohmann::json::array();
             for (const LevelReport& l : r.level_reports) a.push_back(to_json(l));
             return a;
           }()},
          {"split_ms", r.split_ms},
          {"coarsen_ms", r.coarsen_ms},
          {"embed_ms", r.embed_ms},
          {"classify_ms", r.classify_ms},
          {"eval_seed", r.eval_seed},
          {"config", to_json(r.config)}};
}

// The train/test split run_link_prediction uses for `eval_seed`.
inline SplitResult evaluation_split(const Graph& g, std::uint64_t eval_seed, double test_fraction = 0.2) {
  return split_train_test(g, test_fraction, derive_seed({eval_seed, 1}));
}

// Split 80/20, embed the training graph, fit a classifier on Hadamard
// features of train edges against as many sampled non-edges, and report the
// AUCROC on the withheld edges against as many fresh non-edges.
inline EvalReport run_link_prediction(const Graph& g, const TrainConfig& cfg, std::uint64_t eval_seed,
                                      const MemoryBudget& budget = {}, const EvalOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t) { return std::chrono::duration<double, std::milli>(clock::now() - t).count(); };
  EvalReport rep;
  rep.config = cfg;
  rep.eval_seed = eval_seed;

  auto t = clock::now();
  const SplitResult split = evaluation_split(g, eval_seed, opts.test_fraction);
  const Graph& train = split.train_graph;
  rep.split_ms = ms_since(t);
  rep.train_vertices = train.num_vertices();
  rep.train_edges = train.num_edges();

  EmbeddingMatrix emb;
  if (opts.skip_training) {
    emb = init_embedding(train.num_vertices(), cfg.dim, initial_embedding_seed(cfg.seed));
  } else {
    MultilevelResult res = train_multilevel(train, cfg, budget, opts.log);
    rep.coarsen_ms = res.coarsen_ms;
    rep.embed_ms = res.train_ms;
    rep.levels = res.levels.size();
    rep.level_reports = res.levels;
    emb = std::move(res.embedding);
  }

  t = clock::now();
  std::vector<Edge> train_pairs = edge_list(train);
  rep.train_positive = train_pairs.size();
  const std::vector<Edge> train_neg = sample_negative_edges(train, train_pairs.size(), derive_seed({eval_seed, 2}));
  rep.train_negative = train_neg.size();
  std::vector<std::uint8_t> train_labels(train_pairs.size(), 1);
  train_pairs.insert(train_pairs.end(), train_neg.begin(), train_neg.end());
  train_labels.resize(train_pairs.size(), 0);
  LogRegHyper hyper = opts.classifier;
  hyper.seed = derive_seed({eval_seed, 3});
  const LogRegModel model = train_logreg(hadamard_features(emb, train_pairs, train_labels, cfg.num_workers), hyper);

  std::vector<Edge> test_pairs = split.test_edges;
  rep.test_positive = test_pairs.size();
  const std::vector<Edge> test_neg =
      sample_negative_edges(train, test_pairs.size(), derive_seed({eval_seed, 4}), split.test_edges);
  rep.test_negative = test_neg.size();
  std::vector<std::uint8_t> test_labels(test_pairs.size(), 1);
  test_pairs.insert(test_pairs.end(), test_neg.begin(), test_neg.end());
  test_labels.resize(test_pairs.size(), 0);
  const FeatureSet test_features = hadamard_features(emb, test_pairs, test_labels, cfg.num_workers);
  std::vector<double> scores(test_features.size());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = model.decision(test_features.row(i));
  rep.aucroc = auc_roc(scores, test_labels);
  rep.classify_ms = ms_since(t);

  if (opts.scores_csv) {
    *opts.scores_csv << "u,v,score,label\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
      *opts.scores_csv << split.train_to_input[test_pairs[i].u] << ',' << split.train_to_input[test_pairs[i].v]
                       << ',' << scores[i] << ',' << static_cast<int>(test_labels[i]) << '\n';
  }
  return rep;
}

}  // namespace gosh
