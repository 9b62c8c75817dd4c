/*
 * Copyright 2026 The dcnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dcnsim/bitvec.hpp"
#include "dcnsim/deform.hpp"

namespace dcnsim {

/// Half-open feature rectangle [row_begin, row_end) x [col_begin, col_end).
struct TileRect {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;

  std::size_t rows() const noexcept { return row_end - row_begin; }
  std::size_t cols() const noexcept { return col_end - col_begin; }
  std::size_t area() const noexcept { return rows() * cols(); }
};

/// Rectangular partition of an H x W feature plane. Tile IDs are row-major.
struct TileGrid {
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::size_t height = 0;
  std::size_t width = 0;
  /// First feature row / column of each tile row / column; [0] == 0.
  std::vector<std::size_t> row_boundaries;
  std::vector<std::size_t> col_boundaries;

  std::size_t count() const noexcept { return rows * cols; }
  std::size_t id(std::size_t tile_row, std::size_t tile_col) const noexcept {
    return tile_row * cols + tile_col;
  }
  TileRect rect(std::size_t id) const noexcept;
};

/// Uniform split with the remainder in the last tile (step = ceil(extent / n)).
/// Falls back to a balanced split when the uniform step would leave a tile empty.
/// Throws ConfigError unless 1 <= tile_rows <= H and 1 <= tile_cols <= W.
TileGrid build_tile_grid(std::size_t height, std::size_t width, std::size_t tile_rows,
                         std::size_t tile_cols);

/// Grid of ceil(H / tile_h) x ceil(W / tile_w) tiles (tile extents capped at the plane).
TileGrid grid_for_tile_size(std::size_t height, std::size_t width, std::size_t tile_h,
                            std::size_t tile_w);

/// Comparator bank: bit k-1 is (coord >= boundaries[k]) for each interior boundary.
BitVector compare_boundaries(double coord, std::span<const std::size_t> boundaries);

/// Thermometer decoder: index of the tile row/column selected by a comparison vector.
std::size_t decode_comparison(const BitVector& comparison) noexcept;

/// Tile holding a clamped coordinate; a coordinate on a boundary belongs to the higher tile.
std::size_t locate_tile(double row, double col, const TileGrid& grid);
inline std::size_t locate_tile(Coord at, const TileGrid& grid) {
  return locate_tile(at.row, at.col, grid);
}

/// The four integer neighbours of a clamped coordinate in the order
/// (floor, floor), (floor, ceil), (ceil, floor), (ceil, ceil). Duplicates are kept.
std::array<std::array<std::size_t, 2>, 4> bli_neighbors(Coord at) noexcept;

/// Row r is the dependency bit vector of output tile r over the input tiles.
struct TileDependencyTable {
  std::size_t n_out = 0;
  std::size_t n_in = 0;
  std::vector<BitVector> rows;

  TileDependencyTable() = default;
  TileDependencyTable(std::size_t out_tiles, std::size_t in_tiles)
      : n_out(out_tiles), n_in(in_tiles), rows(out_tiles, BitVector(in_tiles)) {}
  /// Each string is one row, leftmost character = input tile 0.
  static TileDependencyTable from_strings(std::span<const std::string> rows);

  const BitVector& row(std::size_t r) const noexcept { return rows[r]; }
  BitVector used_inputs() const;
  std::size_t max_row_count() const noexcept;
  /// One row per line, '1'/'0' per input tile.
  std::string to_bitmap() const;
  bool operator==(const TileDependencyTable&) const = default;
};

/// OR-accumulates, per output tile, the input tiles of every BLI neighbour read.
TileDependencyTable build_tdt(const OffsetField& offs, const TileGrid& grid_in,
                              const TileGrid& grid_out);

/// Per output tile, one bit vector per output position (row-major inside the tile).
using FeatureDependencies = std::vector<std::vector<BitVector>>;
FeatureDependencies build_feature_dependencies(const OffsetField& offs, const TileGrid& grid_in,
                                               const TileGrid& grid_out);

/// Bilinear evaluations attributed to each output tile. kWindow: positions x taps.
/// kPlane: each plane position counts once, in the output tile at its scaled position.
std::vector<std::size_t> deformed_per_tile(const OffsetField& offs, const TileGrid& grid_out);

struct AccessHistogram {
  std::size_t height = 0;
  std::size_t width = 0;
  /// Four reads per sample (duplicate neighbours at integer coordinates hit the same feature).
  std::vector<std::uint64_t> per_feature;
  /// One count per sample at its (floor, floor) feature.
  std::vector<std::uint64_t> raw_per_feature;
  std::vector<std::uint64_t> per_tile;
  std::uint64_t samples = 0;

  std::uint64_t total() const noexcept;
  /// Coefficient of variation (population stddev / mean) of per_tile.
  double tile_cv() const noexcept;
  /// Fraction of features whose raw count exceeds `threshold`.
  double raw_share_above(std::uint64_t threshold) const noexcept;
};

AccessHistogram access_histogram(const OffsetField& offs, const TileGrid& grid);

}  // namespace dcnsim
