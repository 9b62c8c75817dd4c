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

#include "dcnsim/tiling.hpp"

#include <algorithm>
#include <cmath>

#include "dcnsim/errors.hpp"

namespace dcnsim {
namespace {

std::vector<std::size_t> split(std::size_t extent, std::size_t parts) {
  std::vector<std::size_t> starts(parts);
  const std::size_t step = (extent + parts - 1) / parts;
  if ((parts - 1) * step < extent) {
    for (std::size_t k = 0; k < parts; ++k) starts[k] = k * step;
    return starts;
  }
  const std::size_t base = extent / parts;
  const std::size_t extra = extent % parts;
  std::size_t at = 0;
  for (std::size_t k = 0; k < parts; ++k) {
    starts[k] = at;
    at += base + (k < extra ? 1 : 0);
  }
  return starts;
}

std::size_t extent_end(const std::vector<std::size_t>& starts, std::size_t k,
                       std::size_t extent) noexcept {
  return k + 1 < starts.size() ? starts[k + 1] : extent;
}

void check_grid_matches(const TileGrid& grid, std::size_t h, std::size_t w, const char* which) {
  if (grid.height != h || grid.width != w) {
    throw ConfigError(std::string(which) + " tile grid covers " + std::to_string(grid.height) +
                      "x" + std::to_string(grid.width) + " but the map is " +
                      std::to_string(h) + "x" + std::to_string(w));
  }
}

// Output position that a kPlane sample at plane position (r, s) is attributed to.
std::size_t scaled(std::size_t v, std::size_t from, std::size_t to) noexcept {
  return std::min(to - 1, v * to / from);
}

}  // namespace

TileRect TileGrid::rect(std::size_t id) const noexcept {
  const std::size_t tr = id / cols;
  const std::size_t tc = id % cols;
  return {row_boundaries[tr], extent_end(row_boundaries, tr, height), col_boundaries[tc],
          extent_end(col_boundaries, tc, width)};
}

TileGrid build_tile_grid(std::size_t height, std::size_t width, std::size_t tile_rows,
                         std::size_t tile_cols) {
  if (height == 0 || width == 0) throw ConfigError("tile grid: feature map has zero extent");
  if (tile_rows == 0 || tile_cols == 0) throw ConfigError("tile grid: zero tiles requested");
  if (tile_rows > height) {
    throw ConfigError("tile grid: " + std::to_string(tile_rows) + " tile rows exceed height " +
                      std::to_string(height));
  }
  if (tile_cols > width) {
    throw ConfigError("tile grid: " + std::to_string(tile_cols) + " tile cols exceed width " +
                      std::to_string(width));
  }
  TileGrid g;
  g.rows = tile_rows;
  g.cols = tile_cols;
  g.height = height;
  g.width = width;
  g.row_boundaries = split(height, tile_rows);
  g.col_boundaries = split(width, tile_cols);
  return g;
}

TileGrid grid_for_tile_size(std::size_t height, std::size_t width, std::size_t tile_h,
                            std::size_t tile_w) {
  if (tile_h == 0 || tile_w == 0) throw ConfigError("tile size must be positive");
  tile_h = std::min(tile_h, height);
  tile_w = std::min(tile_w, width);
  return build_tile_grid(height, width, (height + tile_h - 1) / tile_h,
                         (width + tile_w - 1) / tile_w);
}

BitVector compare_boundaries(double coord, std::span<const std::size_t> boundaries) {
  BitVector cmp(boundaries.empty() ? 0 : boundaries.size() - 1);
  for (std::size_t k = 1; k < boundaries.size(); ++k) {
    if (coord >= static_cast<double>(boundaries[k])) cmp.set(k - 1);
  }
  return cmp;
}

std::size_t decode_comparison(const BitVector& comparison) noexcept {
  // Boundaries ascend, so the vector is a thermometer code: its weight is the index.
  return comparison.count();
}

std::size_t locate_tile(double row, double col, const TileGrid& grid) {
  const std::size_t tr = decode_comparison(compare_boundaries(row, grid.row_boundaries));
  const std::size_t tc = decode_comparison(compare_boundaries(col, grid.col_boundaries));
  return grid.id(tr, tc);
}

std::array<std::array<std::size_t, 2>, 4> bli_neighbors(Coord at) noexcept {
  const auto lo_r = static_cast<std::size_t>(std::floor(at.row));
  const auto lo_c = static_cast<std::size_t>(std::floor(at.col));
  const auto hi_r = static_cast<std::size_t>(std::ceil(at.row));
  const auto hi_c = static_cast<std::size_t>(std::ceil(at.col));
  return {{{lo_r, lo_c}, {lo_r, hi_c}, {hi_r, lo_c}, {hi_r, hi_c}}};
}

TileDependencyTable TileDependencyTable::from_strings(std::span<const std::string> lines) {
  TileDependencyTable t;
  t.n_out = lines.size();
  t.n_in = lines.empty() ? 0 : lines.front().size();
  for (const auto& l : lines) {
    if (l.size() != t.n_in) throw ConfigError("TDT rows must have equal length");
    t.rows.push_back(BitVector::from_string(l));
  }
  return t;
}

BitVector TileDependencyTable::used_inputs() const {
  BitVector all(n_in);
  for (const auto& r : rows) all |= r;
  return all;
}

std::size_t TileDependencyTable::max_row_count() const noexcept {
  std::size_t m = 0;
  for (const auto& r : rows) m = std::max(m, r.count());
  return m;
}

std::string TileDependencyTable::to_bitmap() const {
  std::string out;
  out.reserve(n_out * (n_in + 1));
  for (const auto& r : rows) {
    out += r.to_string();
    out += '\n';
  }
  return out;
}

TileDependencyTable build_tdt(const OffsetField& offs, const TileGrid& grid_in,
                              const TileGrid& grid_out) {
  check_grid_matches(grid_in, offs.window.in_height, offs.window.in_width, "input");
  check_grid_matches(grid_out, offs.window.out_height, offs.window.out_width, "output");
  TileDependencyTable tdt(grid_out.count(), grid_in.count());
  // Output positions map to tiles once; coordinates go through the comparator path.
  std::vector<std::size_t> out_tile(offs.window.positions());
  for (std::size_t r = 0; r < offs.window.out_height; ++r) {
    for (std::size_t s = 0; s < offs.window.out_width; ++s) {
      out_tile[r * offs.window.out_width + s] =
          locate_tile(static_cast<double>(r), static_cast<double>(s), grid_out);
    }
  }
  offs.for_each_sample([&](std::size_t r, std::size_t s, std::size_t, Coord at) {
    BitVector& row = tdt.rows[out_tile[r * offs.window.out_width + s]];
    for (const auto& n : bli_neighbors(at)) {
      row.set(locate_tile(static_cast<double>(n[0]), static_cast<double>(n[1]), grid_in));
    }
  });
  return tdt;
}

FeatureDependencies build_feature_dependencies(const OffsetField& offs, const TileGrid& grid_in,
                                               const TileGrid& grid_out) {
  check_grid_matches(grid_in, offs.window.in_height, offs.window.in_width, "input");
  check_grid_matches(grid_out, offs.window.out_height, offs.window.out_width, "output");
  FeatureDependencies deps(grid_out.count());
  const std::size_t k = offs.window.kernel;
  for (std::size_t t = 0; t < grid_out.count(); ++t) {
    const TileRect rc = grid_out.rect(t);
    deps[t].reserve(rc.area());
    for (std::size_t r = rc.row_begin; r < rc.row_end; ++r) {
      for (std::size_t s = rc.col_begin; s < rc.col_end; ++s) {
        BitVector need(grid_in.count());
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = 0; j < k; ++j) {
            const auto at = offs.sample(r, s, i, j);
            if (!at) continue;
            for (const auto& n : bli_neighbors(*at)) {
              need.set(locate_tile(static_cast<double>(n[0]), static_cast<double>(n[1]),
                                   grid_in));
            }
          }
        }
        deps[t].push_back(std::move(need));
      }
    }
  }
  return deps;
}

std::vector<std::size_t> deformed_per_tile(const OffsetField& offs, const TileGrid& grid_out) {
  check_grid_matches(grid_out, offs.window.out_height, offs.window.out_width, "output");
  std::vector<std::size_t> counts(grid_out.count(), 0);
  const auto& w = offs.window;
  if (offs.variant == DcnVariant::kWindow) {
    for (std::size_t t = 0; t < grid_out.count(); ++t) counts[t] = grid_out.rect(t).area() * w.taps();
    return counts;
  }
  for (std::size_t r = 0; r < w.in_height; ++r) {
    const std::size_t orow = scaled(r, w.in_height, w.out_height);
    for (std::size_t s = 0; s < w.in_width; ++s) {
      const std::size_t ocol = scaled(s, w.in_width, w.out_width);
      ++counts[locate_tile(static_cast<double>(orow), static_cast<double>(ocol), grid_out)];
    }
  }
  return counts;
}

std::uint64_t AccessHistogram::total() const noexcept {
  std::uint64_t t = 0;
  for (auto v : per_feature) t += v;
  return t;
}

double AccessHistogram::tile_cv() const noexcept {
  if (per_tile.empty()) return 0.0;
  double mean = 0.0;
  for (auto v : per_tile) mean += static_cast<double>(v);
  mean /= static_cast<double>(per_tile.size());
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (auto v : per_tile) {
    const double d = static_cast<double>(v) - mean;
    var += d * d;
  }
  var /= static_cast<double>(per_tile.size());
  return std::sqrt(var) / mean;
}

double AccessHistogram::raw_share_above(std::uint64_t threshold) const noexcept {
  if (raw_per_feature.empty()) return 0.0;
  std::size_t n = 0;
  for (auto v : raw_per_feature) n += v > threshold ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(raw_per_feature.size());
}

AccessHistogram access_histogram(const OffsetField& offs, const TileGrid& grid) {
  check_grid_matches(grid, offs.window.in_height, offs.window.in_width, "input");
  AccessHistogram h;
  h.height = offs.window.in_height;
  h.width = offs.window.in_width;
  h.per_feature.assign(h.height * h.width, 0);
  h.raw_per_feature.assign(h.height * h.width, 0);
  h.per_tile.assign(grid.count(), 0);
  offs.for_each_sample([&](std::size_t, std::size_t, std::size_t, Coord at) {
    ++h.samples;
    const auto nb = bli_neighbors(at);
    ++h.raw_per_feature[nb[0][0] * h.width + nb[0][1]];
    for (const auto& n : nb) {
      ++h.per_feature[n[0] * h.width + n[1]];
      ++h.per_tile[locate_tile(static_cast<double>(n[0]), static_cast<double>(n[1]), grid)];
    }
  });
  return h;
}

}  // namespace dcnsim
