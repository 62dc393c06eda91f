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
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gosh/error.hpp"
#include "gosh/graph_io.hpp"
#include "gosh/random.hpp"

namespace gosh {

// Dense row-major |V| x d matrix of floats, one row per vertex.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0f) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<float> row(std::size_t r) noexcept { return {data_.data() + r * dim_, dim_}; }
  std::span<const float> row(std::size_t r) const noexcept { return {data_.data() + r * dim_, dim_}; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  std::size_t footprint_bytes() const noexcept { return data_.size() * sizeof(float); }

  bool all_finite() const noexcept {
    for (float x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

// I.i.d. uniform entries in [-0.5/d, 0.5/d].
inline EmbeddingMatrix init_embedding(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  if (rows == 0 || dim == 0) throw dimension_error("embedding dimensions must be positive");
  EmbeddingMatrix m(rows, dim);
  const double half = 0.5 / static_cast<double>(dim);
  Rng rng{seed, 0x1417u};
  for (float& x : m.data()) x = static_cast<float>((2.0 * rng.uniform() - 1.0) * half);
  return m;
}

inline constexpr std::array<char, 4> kEmbeddingMagic{'G', 'S', 'H', 'E'};
inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

// "GSHE", version u32, rows u64, dim u32, then row-major f32, little-endian.
inline void write_embedding_binary(std::ostream& os, const EmbeddingMatrix& m) {
  os.write(kEmbeddingMagic.data(), kEmbeddingMagic.size());
  detail::put_le<std::uint32_t>(os, kEmbeddingFormatVersion);
  detail::put_le<std::uint64_t>(os, m.rows());
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.dim()));
  detail::put_le_array(os, m.data());
  if (!os) throw error("failed writing embedding");
}

inline EmbeddingMatrix read_embedding_binary(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kEmbeddingMagic) throw input_error("not a GSHE file");
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != kEmbeddingFormatVersion) throw input_error("unsupported GSHE version " + std::to_string(version));
  const auto rows = detail::get_le<std::uint64_t>(is);
  const auto dim = detail::get_le<std::uint32_t>(is);
  EmbeddingMatrix m(rows, dim);
  detail::get_le_array(is, m.data());
  return m;
}

// "orig_id\tv0 v1 ..." per row. Without original ids the row index is used.
inline void write_embedding_tsv(std::ostream& os, const EmbeddingMatrix& m,
                                std::span<const std::uint64_t> original_ids = {}) {
  const auto old_precision = os.precision(9);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << (original_ids.empty() ? r : original_ids[r]) << '\t';
    const auto row = m.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) os << ' ';
      os << row[j];
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace gosh
