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
#include "dcnsim/accel.hpp"
#include "dcnsim/errors.hpp"
#include "dcnsim/offsets.hpp"
#include "oracles.hpp"

using namespace dcnsim;

TEST_CASE("default configuration") {
  const AcceleratorConfig cfg;
  CHECK(cfg.pe_count() == 512);
  CHECK(cfg.clusters() == 128);
  CHECK(cfg.transfer_cycles(4000) == 800);
  CHECK(cfg.transfer_cycles(1) == 1);
  AcceleratorConfig bad = cfg;
  bad.pe_cols = 3;
  bad.pe_rows = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("parity banks: minimal and 4x4 cover") {
  const Tensor3D x(1, 2, 2, std::vector<double>{1, 2, 3, 4});
  const ParityBanks pb = partition_parity_banks(x, 4);
  for (Bank b : {Bank::kEvenEven, Bank::kEvenOdd, Bank::kOddEven, Bank::kOddOdd}) CHECK(pb.bank(b).size() == 1);
  CHECK(pb.bank(Bank::kOddEven)[0] == 3.0);
  const ParityBanks p4 = partition_parity_banks(Tensor3D(1, 4, 4, 1.0), 4);
  for (Bank b : {Bank::kEvenEven, Bank::kEvenOdd, Bank::kOddEven, Bank::kOddOdd}) CHECK(p4.bank(b).size() == 4);
  CHECK_THROWS_AS(partition_parity_banks(x, 6), ConfigError);
}

TEST_CASE("parity banks round-trip through the layout map") {
  std::mt19937_64 rng(4);
  for (std::size_t h : {10, 9}) {
    const Tensor3D x = oracle::random_tensor(rng, 8, h, 10);
    for (std::size_t pe : {4, 16, 64}) {
      const ParityBanks pb = partition_parity_banks(x, pe);
      std::size_t real = 0;
      for (Bank b : {Bank::kEvenEven, Bank::kEvenOdd, Bank::kOddEven, Bank::kOddOdd}) {
        for (std::size_t e = 0; e < pb.bank(b).size(); ++e) {
          const auto f = pb.feature_at(b, e);
          if (!f) continue;
          ++real;
          CHECK(bank_of((*f)[1], (*f)[2]) == b);
          CHECK(pb.bank(b)[e] == x.at((*f)[0], (*f)[1], (*f)[2]));
          const auto slot = pb.locate((*f)[0], (*f)[1], (*f)[2]);
          CHECK(slot.bank == b);
          CHECK(slot.element == e);
        }
      }
      CHECK(real == x.size());
    }
  }
}

TEST_CASE("address conversion of a fractional sample") {
  const auto a = address_convert({2.3, 3.7}, 8, 16, 64);
  CHECK(a[0].offset == 5);
  CHECK(a[1].offset == 5);
  CHECK(a[2].offset == 9);
  CHECK(a[3].offset == 9);
  CHECK(a[0].bank != a[1].bank);
  CHECK(a[2].bank != a[3].bank);
  std::set<Bank> banks;
  for (const auto& b : a) banks.insert(b.bank);
  CHECK(banks.size() == 4);
}

TEST_CASE("integer coordinates collapse onto one feature") {
  std::mt19937_64 rng(2);
  const Tensor3D x = oracle::random_tensor(rng, 4, 6, 6);
  const ParityBanks pb = partition_parity_banks(x, 16);
  for (const auto& addr : address_convert({3, 2}, 6, 4, 16)) {
    for (std::size_t c = 0; c < 4; ++c) CHECK(pb.fetch(addr, c) == x.at(c, 3, 2));
  }
}

TEST_CASE("fetch through converted addresses equals direct indexing") {
  std::mt19937_64 rng(17);
  const Tensor3D x = oracle::random_tensor(rng, 20, 11, 13);
  const ParityBanks pb = partition_parity_banks(x, 32);
  const TileGrid g = build_tile_grid(11, 13, 3, 3);
  std::uniform_real_distribution<double> ua(0, 10), ub(0, 12);
  for (int n = 0; n < 10000; ++n) {
    const Coord at{ua(rng), ub(rng)};
    const std::int64_t t0 = tile_base_index(g.rect(static_cast<std::size_t>(n) % 9), 11, 20, 32);
    const auto addr = address_convert(at, 11, 20, 32, t0);
    const auto nb = bli_neighbors(at);
    const std::size_t c = static_cast<std::size_t>(n) % 20;
    for (std::size_t k = 0; k < 4; ++k) {
      // Address order is lb, rb, lt, rt; neighbour order is (fl,fl), (fl,ce), (ce,fl), (ce,ce).
      const auto& p = nb[k == 1 ? 2 : k == 2 ? 1 : k];
      REQUIRE(pb.fetch(addr[k], c) == x.at(c, p[0], p[1]));
    }
  }
}

TEST_CASE("BLI stage cycles") {
  const AcceleratorConfig cfg;
  CHECK(bli_stage_cycles(32, 4, cfg).compute_cycles == 1 + cfg.pipeline_fill);
  CHECK(bli_stage_cycles(0, 4, cfg).compute_cycles == cfg.pipeline_fill);
  CHECK(bli_stage_cycles(1000, 4, cfg).compute_cycles == 32 + cfg.pipeline_fill);
  CHECK(bli_stage_cycles(1000, 200, cfg).buffer_read_cycles == 2000);
  AcceleratorConfig big = cfg;
  big.pe_rows = 32;
  for (std::uint64_t n : {1, 77, 1000, 4096}) {
    CHECK(bli_stage_cycles(n, 3, big).compute_cycles <= bli_stage_cycles(n, 3, cfg).compute_cycles);
  }
}

TEST_CASE("conv stage cycles") {
  const AcceleratorConfig cfg;
  CHECK(conv_stage_cycles(512, cfg).compute_cycles == 1 + 48);
  CHECK(conv_stage_cycles(0, cfg).compute_cycles == 48);
  const ConvLayerSpec L = ConvLayerSpec::zeros(64, 64, 3, 1, 1);
  CHECK(conv_stage_cycles(L, 56, 56, cfg).compute_cycles == (56ull * 56 * 64 * 64 * 9 + 511) / 512 + 48);
}

TEST_CASE("tile-by-tile fused execution is bit-identical") {
  std::mt19937_64 rng(23);
  for (DcnVariant v : {DcnVariant::kPlane, DcnVariant::kWindow}) {
    const Tensor3D x = oracle::random_tensor(rng, 3, 12, 12);
    const ConvLayerSpec main = oracle::random_layer(rng, 3, 4, 3, 1, 1);
    const auto win = WindowGeometry::of(main, 12, 12);
    const OffsetField f = gen_offsets(win, v, 3, 0, 2.0);
    const TileGrid g = build_tile_grid(12, 12, 4, 3);
    const std::vector<std::size_t> order = {7, 3, 11, 0, 5};
    CHECK(fused_deformable_conv(x, f, main, g, order) == deformable_conv(x, f, main));
    const QTensor qx = quantize(x);
    const QConvLayer qm = QConvLayer::from(main);
    CHECK(q_fused_deformable_conv(qx, f, qm, g, order) == q_deformable_conv(qx, f, qm));
    const std::vector<std::size_t> dup = {1, 1};
    CHECK_THROWS_AS(fused_deformable_conv(x, f, main, g, dup), ConfigError);
  }
}
