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
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "gosh/error.hpp"
#include "gosh/graph.hpp"

namespace gosh {

struct LoadedGraph {
  Graph graph;
  // original_ids[dense id] = id as it appeared in the input.
  std::vector<std::uint64_t> original_ids;
};

namespace detail {

inline bool is_blank(char c) noexcept { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

inline std::string_view skip_blanks(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size() && is_blank(s[i])) ++i;
  return s.substr(i);
}

inline bool parse_id(std::string_view& s, std::uint64_t& out) noexcept {
  s = skip_blanks(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr == s.data()) return false;
  const std::size_t used = static_cast<std::size_t>(ptr - s.data());
  if (used < s.size() && !is_blank(s[used])) return false;
  s.remove_prefix(used);
  return true;
}

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), sizeof(T))) throw input_error("truncated binary file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

template <typename T>
void put_le_array(std::ostream& os, std::span<const T> values) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (const T& v : values) put_le(os, v);
  }
}

template <typename T>
void get_le_array(std::istream& is, std::span<T> out) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!is.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size_bytes())))
      throw input_error("truncated binary file");
  } else {
    for (T& v : out) v = get_le<T>(is);
  }
}

}  // namespace detail

// Parses a SNAP-style edge list: one "u v" pair per line, '#' comment lines
// and blank lines ignored. Ids are densified in ascending order of their
// original value.
inline LoadedGraph load_edge_list(std::istream& in, bool directed) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = detail::skip_blanks(line);
    if (s.empty() || s.front() == '#') continue;
    std::uint64_t a = 0, b = 0;
    if (!detail::parse_id(s, a) || !detail::parse_id(s, b))
      throw parse_error(line_no, "expected two non-negative integer vertex ids");
    if (!detail::skip_blanks(s).empty()) throw parse_error(line_no, "trailing tokens after edge");
    raw.emplace_back(a, b);
  }
  if (raw.empty()) throw empty_graph_error();

  LoadedGraph out;
  auto& ids = out.original_ids;
  ids.reserve(raw.size() * 2);
  for (const auto& [a, b] : raw) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() >= kNoVertex) throw input_error("too many distinct vertex ids");
  ids.shrink_to_fit();

  auto dense = [&](std::uint64_t id) {
    return static_cast<vertex_id>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<Edge> arcs;
  arcs.reserve(raw.size());
  for (const auto& [a, b] : raw) arcs.push_back({dense(a), dense(b)});
  raw.clear();
  raw.shrink_to_fit();
  out.graph = Graph::from_arcs(static_cast<vertex_id>(ids.size()), arcs, directed);
  if (out.graph.num_arcs() == 0) throw empty_graph_error();
  return out;
}

// Writes each undirected edge once (each arc for directed graphs). When
// original ids are given they replace the dense ids in the output.
inline void write_edge_list(std::ostream& os, const Graph& g,
                            std::span<const std::uint64_t> original_ids = {}) {
  auto name = [&](vertex_id v) -> std::uint64_t {
    return original_ids.empty() ? v : original_ids[v];
  };
  for (vertex_id u = 0; u < g.num_vertices(); ++u)
    for (vertex_id v : g.neighbors(u))
      if (g.directed() || u < v) os << name(u) << ' ' << name(v) << '\n';
}

inline constexpr std::array<char, 4> kGraphMagic{'G', 'S', 'H', 'G'};
inline constexpr std::uint32_t kGraphFormatVersion = 1;

// Binary CSR cache: "GSHG", version u32, |V| u64, |E| u64, xadj u64[|V|+1],
// adj u32[|E|], all little-endian.
inline void write_binary_graph(std::ostream& os, const Graph& g) {
  os.write(kGraphMagic.data(), kGraphMagic.size());
  detail::put_le<std::uint32_t>(os, kGraphFormatVersion);
  detail::put_le<std::uint64_t>(os, g.num_vertices());
  detail::put_le<std::uint64_t>(os, g.num_arcs());
  detail::put_le_array(os, g.xadj());
  detail::put_le_array(os, g.adj());
  if (!os) throw error("failed writing binary graph");
}

// The directed flag is not stored; a symmetric arc set reads back undirected.
inline Graph read_binary_graph(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kGraphMagic) throw input_error("not a GSHG file");
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != kGraphFormatVersion) throw input_error("unsupported GSHG version " + std::to_string(version));
  const auto n = detail::get_le<std::uint64_t>(is);
  const auto m = detail::get_le<std::uint64_t>(is);
  if (n >= kNoVertex) throw input_error("vertex count out of range");
  std::vector<edge_offset> xadj(n + 1);
  std::vector<vertex_id> adj(m);
  detail::get_le_array(is, std::span<edge_offset>(xadj));
  detail::get_le_array(is, std::span<vertex_id>(adj));
  Graph directed_view(xadj, adj, true);
  const bool symmetric = is_symmetric(directed_view);
  if (symmetric) return Graph(std::move(xadj), std::move(adj), false);
  return directed_view;
}

// Opens `path` as a binary cache when it starts with the GSHG magic, else as a
// text edge list.
inline LoadedGraph load_graph_file(const std::filesystem::path& path, bool directed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path.string());
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 4 && head == kGraphMagic;
  in.clear();
  in.seekg(0);
  if (binary) {
    LoadedGraph out;
    out.graph = read_binary_graph(in);
    out.original_ids.resize(out.graph.num_vertices());
    for (std::size_t i = 0; i < out.original_ids.size(); ++i) out.original_ids[i] = i;
    return out;
  }
  return load_edge_list(in, directed);
}

}  // namespace gosh
