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

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gosh/generators.hpp"
#include "gosh/gosh.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kInput = 3, kRuntime = 4 };

// Flags shared by embed and evaluate. Each one is optional so that only
// explicitly given flags override the config file.
struct TrainingFlags {
  std::map<std::string, std::optional<std::string>> values;
  std::string config_path;
  bool dump_config = false;

  void attach(CLI::App& app) {
    static const std::vector<std::pair<std::string, std::string>> kFlags = {
        {"preset", "fast | normal | slow | nocoarse"},
        {"scale", "medium | large (selects the preset epoch column)"},
        {"dim", "embedding dimension"},
        {"epochs", "total epochs over all levels"},
        {"smoothing", "share of epochs spread uniformly over levels"},
        {"lr", "initial learning rate"},
        {"neg", "negative samples per positive"},
        {"threshold", "stop coarsening at this many vertices"},
        {"workers", "worker threads (0 = all cores)"},
        {"seed", "training seed"},
        {"epoch-unit", "vertex-pass | edge-scaled"},
        {"update-rule", "snapshot | gauss-seidel"},
        {"coarsen", "true | false"},
        {"resident-mb", "resident memory budget in MiB (0 = unlimited)"},
        {"parts-resident", "sub-matrices resident at once (P)"},
        {"pools-resident", "sample pools resident at once (S)"},
        {"pool-batch", "positive samples per vertex per pool (B)"},
        {"backing-file", "keep the full matrix in this file while partitioned"},
        {"repeats", "evaluation repeats"},
        {"eval-seed", "seed for split and negative sampling"},
    };
    for (const auto& [name, help] : kFlags) app.add_option("--" + name, values[name], help);
    app.add_option("--config", config_path, "key = value settings file, overridden by flags");
    app.add_flag("--dump-config", dump_config, "print the effective settings and exit");
  }

  gosh::RunConfig resolve() const {
    std::map<std::string, std::string> settings;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw gosh::input_error("cannot open config " + config_path);
      settings = gosh::read_settings(in);
    }
    for (const auto& [k, v] : values)
      if (v) settings[k] = *v;
    return gosh::resolve_settings(settings);
  }
};

int cmd_coarsen(const std::string& input, bool directed, std::size_t threshold, unsigned workers) {
  const gosh::LoadedGraph loaded = gosh::load_graph_file(input, directed);
  const gosh::Hierarchy h = gosh::coarsen_all(loaded.graph, threshold, workers);
  for (const auto& s : h.stats)
    std::cout << nlohmann::json{{"level", s.level},
                                {"num_vertices", s.num_vertices},
                                {"num_edges", s.num_edges},
                                {"elapsed_ms", s.elapsed_ms}}
                     .dump()
              << '\n';
  if (h.stalled) std::cerr << "coarsening stopped early: level stopped shrinking\n";
  return kOk;
}

int cmd_embed(const std::string& input, bool directed, const std::string& output, const std::string& format,
              const std::string& log_path, const gosh::RunConfig& rc) {
  const gosh::LoadedGraph loaded = gosh::load_graph_file(input, directed);
  std::ofstream log_file;
  if (!log_path.empty()) {
    log_file.open(log_path);
    if (!log_file) throw gosh::input_error("cannot open log " + log_path);
  }
  const gosh::MultilevelResult res =
      gosh::train_multilevel(loaded.graph, rc.train, rc.budget, log_path.empty() ? nullptr : &log_file);

  std::ofstream out(output, format == "tsv" ? std::ios::out : std::ios::binary);
  if (!out) throw gosh::input_error("cannot open output " + output);
  if (format == "tsv") gosh::write_embedding_tsv(out, res.embedding, loaded.original_ids);
  else gosh::write_embedding_binary(out, res.embedding);

  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : res.levels) levels.push_back(gosh::to_json(l));
  std::cout << nlohmann::json{{"vertices", loaded.graph.num_vertices()},
                              {"edges", loaded.graph.num_edges()},
                              {"coarsen_ms", res.coarsen_ms},
                              {"train_ms", res.train_ms},
                              {"levels", levels},
                              {"config", gosh::to_json(rc.train)}}
                   .dump(2)
            << '\n';
  return kOk;
}

int cmd_evaluate(const std::string& input, bool directed, bool large_classifier, const std::string& scores_path,
                 const gosh::RunConfig& rc) {
  const gosh::LoadedGraph loaded = gosh::load_graph_file(input, directed);
  std::ofstream scores;
  if (!scores_path.empty()) {
    scores.open(scores_path);
    if (!scores) throw gosh::input_error("cannot open " + scores_path);
  }
  const std::size_t repeats = std::max<std::size_t>(rc.repeats, 1);
  nlohmann::json runs = nlohmann::json::array();
  std::vector<double> aucs;
  for (std::size_t r = 0; r < repeats; ++r) {
    gosh::TrainConfig cfg = rc.train;
    cfg.seed = rc.train.seed + r;
    gosh::EvalOptions opts;
    if (large_classifier) opts.classifier = gosh::LogRegHyper::large_graph();
    if (r == 0 && !scores_path.empty()) opts.scores_csv = &scores;
    const gosh::EvalReport rep = gosh::run_link_prediction(loaded.graph, cfg, rc.eval_seed + r, rc.budget, opts);
    aucs.push_back(rep.aucroc);
    runs.push_back(gosh::to_json(rep));
  }
  double mean = 0.0;
  for (double a : aucs) mean += a;
  mean /= static_cast<double>(aucs.size());
  double var = 0.0;
  for (double a : aucs) var += (a - mean) * (a - mean);
  const double sd = aucs.size() > 1 ? std::sqrt(var / static_cast<double>(aucs.size() - 1)) : 0.0;
  std::cout << nlohmann::json{{"repeats", repeats}, {"aucroc_mean", mean}, {"aucroc_sd", sd}, {"runs", runs}}.dump(2)
            << '\n';
  return kOk;
}

int cmd_generate(const std::string& kind, gosh::vertex_id n, std::uint64_t seed, double degree,
                 const std::string& output) {
  gosh::Graph g;
  if (kind == "dblp") g = gosh::gen::collaboration(gosh::gen::dblp_like(n), seed);
  else if (kind == "amazon") g = gosh::gen::collaboration(gosh::gen::amazon_like(n), seed);
  else if (kind == "chung-lu") g = gosh::gen::chung_lu(n, degree, 2.3, seed);
  else if (kind == "er") g = gosh::gen::erdos_renyi(n, static_cast<std::size_t>(degree * n / 2), seed);
  else throw gosh::config_error("unknown graph kind '" + kind + "'");
  std::ofstream out(output);
  if (!out) throw gosh::input_error("cannot open output " + output);
  gosh::write_edge_list(out, g);
  std::cerr << "wrote " << g.num_vertices() << " vertices, " << g.num_edges() << " edges\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel graph embedding: coarsening, training, and link-prediction evaluation"};
  app.require_subcommand(1);

  std::string input;
  bool directed = false;

  auto* coarsen = app.add_subcommand("coarsen-stats", "coarsen a graph and print per-level sizes as JSON lines");
  std::size_t threshold = gosh::kDefaultCoarseningThreshold;
  unsigned coarsen_workers = 1;
  coarsen->add_option("--input,-i", input, "edge list or GSHG file")->required();
  coarsen->add_flag("--directed", directed, "treat the edge list as directed");
  coarsen->add_option("--threshold", threshold, "stop at this many vertices");
  coarsen->add_option("--workers", coarsen_workers, "worker threads (0 = all cores)");

  auto* embed = app.add_subcommand("embed", "train an embedding and write it out");
  TrainingFlags embed_flags;
  std::string output, format = "binary", log_path;
  embed->add_option("--input,-i", input, "edge list or GSHG file");
  embed->add_flag("--directed", directed, "treat the edge list as directed");
  embed->add_option("--output,-o", output, "embedding output path");
  embed->add_option("--format", format, "binary | tsv")->check(CLI::IsMember({"binary", "tsv"}));
  embed->add_option("--log", log_path, "JSON-lines run log");
  embed_flags.attach(*embed);

  auto* evaluate = app.add_subcommand("evaluate", "link-prediction AUCROC, averaged over repeats");
  TrainingFlags eval_flags;
  bool large_classifier = false;
  std::string scores_path;
  evaluate->add_option("--input,-i", input, "edge list or GSHG file");
  evaluate->add_flag("--directed", directed, "treat the edge list as directed");
  evaluate->add_flag("--sgd-classifier", large_classifier, "single-pass SGD classifier for large graphs");
  evaluate->add_option("--scores-csv", scores_path, "write u,v,score,label for the first repeat");
  eval_flags.attach(*evaluate);

  auto* generate = app.add_subcommand("generate", "write a synthetic edge list");
  std::string kind = "dblp";
  gosh::vertex_id gen_n = 20000;
  std::uint64_t gen_seed = 1;
  double gen_degree = 8.0;
  generate->add_option("--kind", kind, "dblp | amazon | chung-lu | er");
  generate->add_option("--vertices", gen_n, "vertex count before isolated vertices are dropped");
  generate->add_option("--seed", gen_seed, "generator seed");
  generate->add_option("--degree", gen_degree, "mean degree (chung-lu, er)");
  generate->add_option("--output,-o", output, "edge list path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*coarsen) return cmd_coarsen(input, directed, threshold, coarsen_workers);
    if (*generate) return cmd_generate(kind, gen_n, gen_seed, gen_degree, output);
    TrainingFlags& flags = *embed ? embed_flags : eval_flags;
    const gosh::RunConfig rc = flags.resolve();
    if (flags.dump_config) {
      gosh::write_settings(std::cout, rc);
      return kOk;
    }
    if (input.empty()) throw gosh::config_error("--input is required");
    if (*embed) {
      if (output.empty()) throw gosh::config_error("--output is required");
      return cmd_embed(input, directed, output, format, log_path, rc);
    }
    return cmd_evaluate(input, directed, large_classifier, scores_path, rc);
  } catch (const gosh::config_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const gosh::input_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
