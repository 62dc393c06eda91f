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

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "gosh/coarsen.hpp"
#include "gosh/error.hpp"
#include "gosh/kernels.hpp"

namespace gosh {

enum class EpochUnit {
  kVertexPass,  // one pass over the source vertices
  kEdgeScaled,  // ceil(|E|/|V|) passes, about |E| positive samples
};

enum class GraphScale { kMedium, kLarge };

struct TrainConfig {
  std::size_t dim = 128;
  std::size_t total_epochs = 1000;
  double smoothing_ratio = 0.3;
  double learning_rate = 0.035;
  std::size_t negative_samples = 3;
  std::uint64_t seed = 0;
  unsigned num_workers = 1;
  EpochUnit epoch_unit = EpochUnit::kVertexPass;
  std::size_t coarsening_threshold = kDefaultCoarseningThreshold;
  bool coarsen = true;
  UpdateRule update_rule = UpdateRule::kSnapshot;

  void validate() const {
    if (dim == 0) throw config_error("dim must be positive");
    if (total_epochs == 0) throw config_error("epochs must be positive");
    if (!(smoothing_ratio >= 0.0 && smoothing_ratio <= 1.0)) throw config_error("smoothing must be in [0, 1]");
    if (!(learning_rate > 0.0)) throw config_error("learning rate must be positive");
    if (negative_samples == 0) throw config_error("negative samples must be >= 1");
    if (coarsening_threshold == 0) throw config_error("threshold must be >= 1");
  }
};

// Bounded "fast memory" that the partitioned trainer must stay within.
struct MemoryBudget {
  std::size_t resident_bytes = 0;  // 0 = unlimited
  std::size_t parts_resident = 3;  // P
  std::size_t pools_resident = 4;  // S
  std::size_t batch_size = 5;      // B, positive samples per vertex per pool
  std::string backing_file;        // empty = keep the full matrix in memory

  bool unlimited() const noexcept { return resident_bytes == 0; }

  void validate() const {
    if (parts_resident < 2) throw config_error("parts-resident must be >= 2");
    if (pools_resident < 1) throw config_error("pools-resident must be >= 1");
    if (batch_size < 1) throw config_error("pool-batch must be >= 1");
  }
};

struct Preset {
  std::string_view name;
  double smoothing;
  double learning_rate;
  std::size_t epochs_medium;
  std::size_t epochs_large;
  bool coarsen;
};

inline constexpr std::array<Preset, 4> kPresets{{
    {"fast", 0.1, 0.050, 600, 100, true},
    {"normal", 0.3, 0.035, 1000, 200, true},
    {"slow", 0.5, 0.025, 1400, 300, true},
    {"nocoarse", 1.0, 0.045, 1000, 200, false},
}};

inline const Preset& find_preset(std::string_view name) {
  for (const Preset& p : kPresets)
    if (p.name == name) return p;
  throw config_error("unknown preset '" + std::string(name) + "' (expected fast, normal, slow, nocoarse)");
}

inline void apply_preset(TrainConfig& cfg, const Preset& preset, GraphScale scale = GraphScale::kMedium) {
  cfg.smoothing_ratio = preset.smoothing;
  cfg.learning_rate = preset.learning_rate;
  cfg.total_epochs = scale == GraphScale::kMedium ? preset.epochs_medium : preset.epochs_large;
  cfg.coarsen = preset.coarsen;
}

inline std::string_view to_string(EpochUnit u) noexcept {
  return u == EpochUnit::kVertexPass ? "vertex-pass" : "edge-scaled";
}

inline std::string_view to_string(UpdateRule r) noexcept {
  return r == UpdateRule::kSnapshot ? "snapshot" : "gauss-seidel";
}

// Everything a run needs besides its input and output paths.
struct RunConfig {
  TrainConfig train;
  MemoryBudget budget;
  GraphScale scale = GraphScale::kMedium;
  std::size_t repeats = 1;
  std::uint64_t eval_seed = 0;
};

namespace detail {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw config_error("invalid value '" + std::string(value) + "' for " + std::string(key));
  return out;
}

inline bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw config_error("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

// Applies one key=value setting. Keys are the CLI flag names without dashes.
inline void apply_setting(RunConfig& rc, std::string_view key, std::string_view value) {
  using detail::parse_number;
  TrainConfig& t = rc.train;
  MemoryBudget& b = rc.budget;
  if (key == "preset") {
    apply_preset(t, find_preset(value), rc.scale);
  } else if (key == "scale") {
    if (value == "medium") rc.scale = GraphScale::kMedium;
    else if (value == "large") rc.scale = GraphScale::kLarge;
    else throw config_error("scale must be medium or large");
  } else if (key == "dim") {
    t.dim = parse_number<std::size_t>(key, value);
  } else if (key == "epochs") {
    t.total_epochs = parse_number<std::size_t>(key, value);
  } else if (key == "smoothing") {
    t.smoothing_ratio = parse_number<double>(key, value);
  } else if (key == "lr") {
    t.learning_rate = parse_number<double>(key, value);
  } else if (key == "neg") {
    t.negative_samples = parse_number<std::size_t>(key, value);
  } else if (key == "threshold") {
    t.coarsening_threshold = parse_number<std::size_t>(key, value);
  } else if (key == "workers") {
    t.num_workers = parse_number<unsigned>(key, value);
  } else if (key == "seed") {
    t.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "coarsen") {
    t.coarsen = detail::parse_bool(key, value);
  } else if (key == "epoch-unit") {
    if (value == "vertex-pass") t.epoch_unit = EpochUnit::kVertexPass;
    else if (value == "edge-scaled") t.epoch_unit = EpochUnit::kEdgeScaled;
    else throw config_error("epoch-unit must be vertex-pass or edge-scaled");
  } else if (key == "update-rule") {
    if (value == "snapshot") t.update_rule = UpdateRule::kSnapshot;
    else if (value == "gauss-seidel") t.update_rule = UpdateRule::kGaussSeidel;
    else throw config_error("update-rule must be snapshot or gauss-seidel");
  } else if (key == "resident-mb") {
    b.resident_bytes = parse_number<std::size_t>(key, value) * 1024 * 1024;
  } else if (key == "resident-bytes") {
    b.resident_bytes = parse_number<std::size_t>(key, value);
  } else if (key == "parts-resident") {
    b.parts_resident = parse_number<std::size_t>(key, value);
  } else if (key == "pools-resident") {
    b.pools_resident = parse_number<std::size_t>(key, value);
  } else if (key == "pool-batch") {
    b.batch_size = parse_number<std::size_t>(key, value);
  } else if (key == "backing-file") {
    b.backing_file = std::string(value);
  } else if (key == "repeats") {
    rc.repeats = parse_number<std::size_t>(key, value);
  } else if (key == "eval-seed") {
    rc.eval_seed = parse_number<std::uint64_t>(key, value);
  } else {
    throw config_error("unknown setting '" + std::string(key) + "'");
  }
}

// Resolves settings in a fixed order: scale, then preset, then everything
// else. Later entries for the same key win.
inline RunConfig resolve_settings(const std::map<std::string, std::string>& settings) {
  RunConfig rc;
  if (auto it = settings.find("scale"); it != settings.end()) apply_setting(rc, it->first, it->second);
  if (auto it = settings.find("preset"); it != settings.end()) apply_setting(rc, it->first, it->second);
  for (const auto& [k, v] : settings)
    if (k != "scale" && k != "preset") apply_setting(rc, k, v);
  rc.train.validate();
  rc.budget.validate();
  return rc;
}

// Reads "key = value" lines; '#' starts a comment line.
inline std::map<std::string, std::string> read_settings(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw config_error("config line " + std::to_string(line_no) + ": missing '='");
    const auto key = detail::trim(s.substr(0, eq));
    const auto value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw config_error("config line " + std::to_string(line_no) + ": empty key");
    out[std::string(key)] = std::string(value);
  }
  return out;
}

// Every effective setting, in a form read_settings/resolve_settings accepts.
inline void write_settings(std::ostream& os, const RunConfig& rc) {
  const TrainConfig& t = rc.train;
  const MemoryBudget& b = rc.budget;
  const auto shortest = [](double x) {
    std::array<char, 32> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), r.ptr);
  };
  os << "scale = " << (rc.scale == GraphScale::kMedium ? "medium" : "large") << '\n'
     << "dim = " << t.dim << '\n'
     << "epochs = " << t.total_epochs << '\n'
     << "smoothing = " << shortest(t.smoothing_ratio) << '\n'
     << "lr = " << shortest(t.learning_rate) << '\n'
     << "neg = " << t.negative_samples << '\n'
     << "threshold = " << t.coarsening_threshold << '\n'
     << "coarsen = " << (t.coarsen ? "true" : "false") << '\n'
     << "workers = " << t.num_workers << '\n'
     << "seed = " << t.seed << '\n'
     << "epoch-unit = " << to_string(t.epoch_unit) << '\n'
     << "update-rule = " << to_string(t.update_rule) << '\n'
     << "resident-bytes = " << b.resident_bytes << '\n'
     << "parts-resident = " << b.parts_resident << '\n'
     << "pools-resident = " << b.pools_resident << '\n'
     << "pool-batch = " << b.batch_size << '\n'
     << "repeats = " << rc.repeats << '\n'
     << "eval-seed = " << rc.eval_seed << '\n';
  if (!b.backing_file.empty()) os << "backing-file = " << b.backing_file << '\n';
}

}  // namespace gosh
