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

#include <random>

#include "doctest.h"
#include "dcnsim/errors.hpp"
#include "dcnsim/offsets.hpp"
#include "dcnsim/tiling.hpp"
#include "oracles.hpp"

using namespace dcnsim;

namespace {

OffsetField random_field(std::mt19937_64& rng, DcnVariant v, const WindowGeometry& win, double spread) {
  const std::size_t n = v == DcnVariant::kPlane ? win.in_height * win.in_width : win.positions() * win.taps();
  const auto d = oracle::uniform(rng, 2 * n, -spread, spread);
  std::vector<Coord> disp;
  for (std::size_t k = 0; k < d.size(); k += 2) disp.push_back({d[k], d[k + 1]});
  return offsets_from_displacements(v, win, disp);
}

}  // namespace

TEST_CASE("5x5 grid on a 10x10 map has 25 tiles of 2x2") {
  const TileGrid g = build_tile_grid(10, 10, 5, 5);
  CHECK(g.count() == 25);
  for (std::size_t t = 0; t < 25; ++t) {
    CHECK(g.rect(t).rows() == 2);
    CHECK(g.rect(t).cols() == 2);
  }
}

TEST_CASE("single-tile grid covers the map") {
  const TileGrid g = build_tile_grid(10, 10, 1, 1);
  CHECK(g.count() == 1);
  CHECK(g.rect(0).area() == 100);
}

TEST_CASE("remainder goes to the last tile") {
  const TileGrid g = build_tile_grid(10, 4, 3, 1);
  CHECK(g.row_boundaries == std::vector<std::size_t>{0, 4, 8});
  CHECK(g.rect(0).row_end == 4);
  CHECK(g.rect(2).row_begin == 8);
  CHECK(g.rect(2).row_end == 10);
}

TEST_CASE("grids always partition the map") {
  for (std::size_t H = 1; H <= 23; ++H) {
    for (std::size_t n = 1; n <= H; ++n) {
      const TileGrid g = build_tile_grid(H, 3, n, 1);
      std::size_t covered = 0;
      for (std::size_t t = 0; t < g.count(); ++t) {
        CHECK(g.rect(t).rows() > 0);
        covered += g.rect(t).rows();
      }
      CHECK(covered == H);
    }
  }
  CHECK_THROWS_AS(build_tile_grid(0, 4, 1, 1), ConfigError);
  CHECK_THROWS_AS(build_tile_grid(4, 4, 5, 1), ConfigError);
  CHECK_THROWS_AS(build_tile_grid(4, 4, 1, 0), ConfigError);
}

TEST_CASE("tile-size grids") {
  const TileGrid g = grid_for_tile_size(10, 7, 4, 4);
  CHECK(g.rows == 3);
  CHECK(g.cols == 2);
  CHECK(g.rect(5).rows() == 2);
  CHECK(g.rect(5).cols() == 3);
  CHECK(grid_for_tile_size(10, 7, 50, 50).count() == 1);
}

TEST_CASE("comparator vector and decoder") {
  const TileGrid g = build_tile_grid(10, 10, 5, 5);
  const BitVector v = compare_boundaries(4.5, g.row_boundaries);
  CHECK(v.to_string() == "1100");
  CHECK(decode_comparison(v) == 2);
  CHECK(decode_comparison(compare_boundaries(0.0, g.row_boundaries)) == 0);
  CHECK(decode_comparison(compare_boundaries(9.0, g.row_boundaries)) == 4);
}

TEST_CASE("locate_tile: 5x5 grid, origin and division oracle") {
  const TileGrid g = build_tile_grid(10, 10, 5, 5);
  CHECK(locate_tile(4.5, 2.5, g) == 11);
  CHECK(locate_tile(0.0, 0.0, g) == 0);
  CHECK(locate_tile(4.0, 2.0, g) == 11);  // boundaries belong to the higher tile
  CHECK(locate_tile(3.999, 1.999, g) == 5);
  std::mt19937_64 rng(11);
  for (auto [H, W, R, C] : {std::array<std::size_t, 4>{10, 10, 5, 5}, {17, 23, 4, 6}, {32, 9, 3, 2}}) {
    const TileGrid gr = build_tile_grid(H, W, R, C);
    std::uniform_real_distribution<double> ua(0.0, static_cast<double>(H - 1)), ub(0.0, static_cast<double>(W - 1));
    for (int n = 0; n < 10000; ++n) {
      const double a = ua(rng), b = ub(rng);
      REQUIRE(locate_tile(a, b, gr) == oracle::tile_by_division(a, b, H, W, R, C));
    }
    for (std::size_t r = 0; r < H; ++r) {
      for (std::size_t s = 0; s < W; ++s) {
        const double a = static_cast<double>(r), b = static_cast<double>(s);
        REQUIRE(locate_tile(a, b, gr) == oracle::tile_by_division(a, b, H, W, R, C));
      }
    }
  }
}

TEST_CASE("neighbour order") {
  const auto n = bli_neighbors({2.3, 3.7});
  CHECK(n[0] == std::array<std::size_t, 2>{2, 3});
  CHECK(n[1] == std::array<std::size_t, 2>{2, 4});
  CHECK(n[2] == std::array<std::size_t, 2>{3, 3});
  CHECK(n[3] == std::array<std::size_t, 2>{3, 4});
}

TEST_CASE("TDT of a single-tile grid is [1]") {
  const auto win = WindowGeometry::make(8, 8, 3, 1, 1);
  const TileGrid g = build_tile_grid(8, 8, 1, 1);
  const auto tdt = build_tdt(zero_offsets(DcnVariant::kWindow, win), g, g);
  CHECK(tdt.to_bitmap() == "1\n");
}

TEST_CASE("zero-offset 1x1 kernel gives the identity TDT") {
  const auto win = WindowGeometry::make(10, 10, 1, 1, 0);
  const TileGrid g = build_tile_grid(10, 10, 5, 5);
  for (DcnVariant v : {DcnVariant::kPlane, DcnVariant::kWindow}) {
    const auto tdt = build_tdt(zero_offsets(v, win), g, g);
    for (std::size_t r = 0; r < 25; ++r) {
      CHECK(tdt.row(r).count() == 1);
      CHECK(tdt.row(r).test(r));
    }
  }
}

TEST_CASE("TDT rows equal the brute-force neighbour scan") {
  std::mt19937_64 rng(3);
  for (DcnVariant v : {DcnVariant::kPlane, DcnVariant::kWindow}) {
    const auto win = WindowGeometry::make(12, 11, 3, 1, 1);
    const OffsetField f = random_field(rng, v, win, 4.0);
    const TileGrid gin = build_tile_grid(12, 11, 5, 5);
    const TileGrid gout = build_tile_grid(win.out_height, win.out_width, 5, 5);
    const auto tdt = build_tdt(f, gin, gout);
    const auto want = oracle::brute_tdt(f, gin, gout);
    for (std::size_t r = 0; r < gout.count(); ++r) {
      const auto ones = tdt.row(r).ones();
      CHECK(std::set<std::size_t>(ones.begin(), ones.end()) == want[r]);
    }
  }
}

TEST_CASE("feature dependencies union to the TDT row") {
  std::mt19937_64 rng(4);
  const auto win = WindowGeometry::make(9, 9, 3, 1, 1);
  const OffsetField f = random_field(rng, DcnVariant::kWindow, win, 3.0);
  const TileGrid g = build_tile_grid(9, 9, 3, 3);
  const auto tdt = build_tdt(f, g, g);
  const auto feats = build_feature_dependencies(f, g, g);
  REQUIRE(feats.size() == 9);
  for (std::size_t r = 0; r < 9; ++r) {
    CHECK(feats[r].size() == g.rect(r).area());
    BitVector u(9);
    for (const auto& b : feats[r]) u |= b;
    CHECK(u == tdt.row(r));
  }
}

TEST_CASE("TDT text round-trip") {
  const std::vector<std::string> rows = {"110", "011", "101"};
  const auto t = TileDependencyTable::from_strings(rows);
  CHECK(t.to_bitmap() == "110\n011\n101\n");
  CHECK(t.max_row_count() == 2);
  CHECK(t.used_inputs().count() == 3);
}

TEST_CASE("zero-offset access counts") {
  const auto win = WindowGeometry::make(10, 10, 3, 1, 1);
  const TileGrid g = build_tile_grid(10, 10, 5, 5);
  const AccessHistogram h = access_histogram(zero_offsets(DcnVariant::kWindow, win), g);
  for (std::size_t r = 1; r < 9; ++r) {
    for (std::size_t s = 1; s < 9; ++s) CHECK(h.per_feature[r * 10 + s] == 9 * 4);
  }
  CHECK(h.total() == 4 * h.samples);
  CHECK(h.samples == 100 * 9);
}

TEST_CASE("constant gather puts every access on the origin") {
  const auto win = WindowGeometry::make(6, 6, 3, 1, 1);
  const std::vector<Coord> d(win.positions() * 9, Coord{-20, -20});
  const auto h = access_histogram(offsets_from_displacements(DcnVariant::kWindow, win, d),
                                  build_tile_grid(6, 6, 2, 2));
  CHECK(h.per_feature[0] == h.total());
  CHECK(h.per_tile[0] == h.total());
  CHECK(h.raw_per_feature[0] == h.samples);
}

TEST_CASE("skewed histograms match the scalar counter") {
  for (DcnVariant v : {DcnVariant::kPlane, DcnVariant::kWindow}) {
    const auto win = WindowGeometry::make(20, 20, 3, 1, 1);
    const TileGrid g = build_tile_grid(20, 20, 5, 5);
    const OffsetField f = gen_offsets(win, v, 5, 0, 2.0);
    const auto h = access_histogram(f, g);
    const auto want = oracle::histogram(f, g);
    CHECK(h.per_feature == want.feature);
    CHECK(h.per_tile == want.tile);
    CHECK(h.samples == want.samples);
    CHECK(h.total() == 4 * h.samples);
    std::uint64_t raw = 0;
    for (auto c : h.raw_per_feature) raw += c;
    CHECK(raw == h.samples);
  }
}

TEST_CASE("deformed work per output tile") {
  const auto win = WindowGeometry::make(10, 10, 3, 1, 1);
  const TileGrid g = build_tile_grid(10, 10, 5, 5);
  const auto w = deformed_per_tile(zero_offsets(DcnVariant::kWindow, win), g);
  for (auto n : w) CHECK(n == 4 * 9);
  const auto p = deformed_per_tile(zero_offsets(DcnVariant::kPlane, win), g);
  std::size_t total = 0;
  for (auto n : p) total += n;
  CHECK(total == 100);
}
