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

#include "dcnsim/accel.hpp"

#include <cmath>
#include <string>

#include "dcnsim/errors.hpp"

namespace dcnsim {
namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) noexcept { return (a + b - 1) / b; }

void check_pe_count(std::size_t pe_count) {
  if (pe_count == 0 || pe_count % 4 != 0) {
    throw ConfigError("PE count " + std::to_string(pe_count) +
                      " must be a positive multiple of the 4-PE cluster");
  }
}

// Tiles in `order` first, then every tile it leaves out, ascending.
std::vector<std::size_t> full_order(const TileGrid& grid, std::span<const std::size_t> order) {
  std::vector<bool> seen(grid.count(), false);
  std::vector<std::size_t> out;
  out.reserve(grid.count());
  for (std::size_t t : order) {
    if (t >= grid.count()) throw ConfigError("tile order names tile " + std::to_string(t) +
                                             " outside the output grid");
    if (seen[t]) throw ConfigError("tile order repeats tile " + std::to_string(t));
    seen[t] = true;
    out.push_back(t);
  }
  for (std::size_t t = 0; t < grid.count(); ++t) {
    if (!seen[t]) out.push_back(t);
  }
  return out;
}

void check_fused_args(const OffsetField& offs, std::size_t h, std::size_t w,
                      const TileGrid& grid_out) {
  if (offs.window.in_height != h || offs.window.in_width != w) {
    throw ConfigError("offset field plane does not match the input");
  }
  if (grid_out.height != offs.window.out_height || grid_out.width != offs.window.out_width) {
    throw ConfigError("output tile grid does not cover the output map");
  }
  offs.validate();
}

std::vector<double>& storage(DeformedFeatures& xd) noexcept { return xd.data; }
std::vector<std::int8_t>& storage(QDeformedFeatures& xd) noexcept { return xd.codes; }

// Deformed features of one output tile, laid out as a tile-sized map.
template <class Features, class Sample>
Features tile_features(const OffsetField& offs, const TileRect& rc, std::size_t channels,
                       Sample sample) {
  Features xd;
  xd.channels = channels;
  xd.out_height = rc.rows();
  xd.out_width = rc.cols();
  xd.taps = offs.window.taps();
  auto& buf = storage(xd);
  buf.assign(channels * rc.area() * xd.taps, {});
  const std::size_t k = offs.window.kernel;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t r = rc.row_begin; r < rc.row_end; ++r) {
      for (std::size_t s = rc.col_begin; s < rc.col_end; ++s) {
        const std::size_t pos = (r - rc.row_begin) * rc.cols() + (s - rc.col_begin);
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = 0; j < k; ++j) {
            if (auto at = offs.sample(r, s, i, j)) buf[xd.index(c, pos, i * k + j)] = sample(c, *at);
          }
        }
      }
    }
  }
  return xd;
}

}  // namespace

std::uint64_t AcceleratorConfig::transfer_cycles(std::uint64_t bytes) const noexcept {
  return static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(bytes) / dram_bandwidth * clock_hz));
}

void AcceleratorConfig::validate() const {
  check_pe_count(pe_count());
  if (!(clock_hz > 0.0)) throw ConfigError("clock frequency must be positive");
  if (!(dram_bandwidth > 0.0)) throw ConfigError("DRAM bandwidth must be positive");
  if (in_buf == 0 || out_buf == 0 || weight_buf == 0 || index_buf == 0 || inst_buf == 0) {
    throw ConfigError("buffer sizes must be positive");
  }
  if (bytes_per_element == 0) throw ConfigError("bytes_per_element must be positive");
}

std::size_t ParityBanks::words_per_bank() const noexcept {
  return ((width_ + 1) / 2) * half_height() * groups();
}

ParityBanks::Slot ParityBanks::locate(std::size_t c, std::size_t r,
                                      std::size_t s) const noexcept {
  const std::size_t word = ((s / 2) * half_height() + r / 2) * groups() + c / lanes_;
  return {bank_of(r, s), word * lanes_ + c % lanes_};
}

std::optional<std::array<std::size_t, 3>> ParityBanks::feature_at(
    Bank b, std::size_t element) const noexcept {
  const auto bi = static_cast<std::size_t>(b);
  const std::size_t lane = element % lanes_;
  const std::size_t word = element / lanes_;
  const std::size_t cell = word / groups();
  const std::size_t c = (word % groups()) * lanes_ + lane;
  const std::size_t r = (cell % half_height()) * 2 + bi / 2;
  const std::size_t s = (cell / half_height()) * 2 + bi % 2;
  if (c >= channels_ || r >= height_ || s >= width_) return std::nullopt;
  return std::array<std::size_t, 3>{c, r, s};
}

double ParityBanks::value(std::size_t c, std::size_t r, std::size_t s) const noexcept {
  const Slot slot = locate(c, r, s);
  return banks_[static_cast<std::size_t>(slot.bank)][slot.element];
}

double ParityBanks::fetch(const BankAddress& a, std::size_t c) const noexcept {
  const auto word = static_cast<std::size_t>(a.offset + a.t0) + c / lanes_;
  return banks_[static_cast<std::size_t>(a.bank)][word * lanes_ + c % lanes_];
}

ParityBanks partition_parity_banks(const Tensor3D& x, std::size_t pe_count) {
  check_pe_count(pe_count);
  ParityBanks pb;
  pb.channels_ = x.channels;
  pb.height_ = x.height;
  pb.width_ = x.width;
  pb.lanes_ = pe_count / 4;
  for (auto& b : pb.banks_) b.assign(pb.words_per_bank() * pb.lanes_, 0.0);
  for (std::size_t c = 0; c < x.channels; ++c) {
    for (std::size_t r = 0; r < x.height; ++r) {
      for (std::size_t s = 0; s < x.width; ++s) {
        const auto slot = pb.locate(c, r, s);
        pb.banks_[static_cast<std::size_t>(slot.bank)][slot.element] = x.at(c, r, s);
      }
    }
  }
  return pb;
}

std::int64_t bank_word(std::size_t row, std::size_t col, std::size_t height, std::size_t channels,
                       std::size_t pe_count) noexcept {
  const std::size_t lanes = pe_count / 4;
  const std::size_t i = (channels + lanes - 1) / lanes;
  const std::size_t j = (height + 1) / 2;
  return static_cast<std::int64_t>(((col / 2) * j + row / 2) * i);
}

std::int64_t tile_base_index(const TileRect& tile, std::size_t height, std::size_t channels,
                             std::size_t pe_count) noexcept {
  return bank_word(tile.row_begin, tile.col_begin, height, channels, pe_count);
}

std::array<BankAddress, 4> address_convert(Coord at, std::size_t height, std::size_t channels,
                                           std::size_t pe_count, std::int64_t t0) noexcept {
  const auto lo_r = static_cast<std::size_t>(std::floor(at.row));
  const auto hi_r = static_cast<std::size_t>(std::ceil(at.row));
  const auto lo_c = static_cast<std::size_t>(std::floor(at.col));
  const auto hi_c = static_cast<std::size_t>(std::ceil(at.col));
  auto make = [&](std::size_t r, std::size_t c) {
    return BankAddress{bank_of(r, c), bank_word(r, c, height, channels, pe_count) - t0, t0, r, c};
  };
  return {make(lo_r, lo_c), make(hi_r, lo_c), make(lo_r, hi_c), make(hi_r, hi_c)};
}

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::kConv:
      return "conv";
    case Stage::kOffsetConv:
      return "conv1";
    case Stage::kBli:
      return "bli";
    case Stage::kMainConv:
      return "conv2";
  }
  return "?";
}

StageTiming bli_stage_cycles(std::uint64_t n_deformed, std::size_t channels,
                             const AcceleratorConfig& cfg) {
  cfg.validate();
  StageTiming t;
  t.stage = Stage::kBli;
  t.compute_cycles = ceil_div(n_deformed * channels, cfg.clusters()) + cfg.pipeline_fill;
  t.buffer_read_cycles = n_deformed * ceil_div(channels, cfg.lanes());
  return t;
}

StageTiming conv_stage_cycles(std::uint64_t macs, const AcceleratorConfig& cfg, Stage stage) {
  cfg.validate();
  StageTiming t;
  t.stage = stage;
  t.compute_cycles = ceil_div(macs, cfg.pe_count()) + cfg.pe_rows + cfg.pe_cols;
  return t;
}

StageTiming conv_stage_cycles(const ConvLayerSpec& layer, std::size_t out_height,
                              std::size_t out_width, const AcceleratorConfig& cfg, Stage stage) {
  const std::uint64_t macs = std::uint64_t{out_height} * out_width * layer.out_channels *
                             layer.in_channels * layer.kernel * layer.kernel;
  return conv_stage_cycles(macs, cfg, stage);
}

Tensor3D fused_deformable_conv(const Tensor3D& x, const OffsetField& offs,
                               const ConvLayerSpec& main_layer, const TileGrid& grid_out,
                               std::span<const std::size_t> order) {
  check_fused_args(offs, x.height, x.width, grid_out);
  Tensor3D y(main_layer.out_channels, grid_out.height, grid_out.width);
  for (std::size_t t : full_order(grid_out, order)) {
    const TileRect rc = grid_out.rect(t);
    const auto xd = tile_features<DeformedFeatures>(
        offs, rc, x.channels, [&](std::size_t c, Coord at) { return bli_sample(x, c, at); });
    const Tensor3D part = conv_deformed(xd, main_layer);
    for (std::size_t l = 0; l < y.channels; ++l) {
      for (std::size_t r = rc.row_begin; r < rc.row_end; ++r) {
        for (std::size_t s = rc.col_begin; s < rc.col_end; ++s) {
          y.at(l, r, s) = part.at(l, r - rc.row_begin, s - rc.col_begin);
        }
      }
    }
  }
  return y;
}

QTensor q_fused_deformable_conv(const QTensor& x, const OffsetField& offs,
                                const QConvLayer& main_layer, const TileGrid& grid_out,
                                std::span<const std::size_t> order) {
  check_fused_args(offs, x.height, x.width, grid_out);
  AccTensor acc;
  acc.channels = main_layer.out_channels;
  acc.height = grid_out.height;
  acc.width = grid_out.width;
  acc.frac_bits = x.frac_bits + main_layer.weight_frac_bits;
  acc.acc.assign(acc.channels * acc.height * acc.width, 0);
  for (std::size_t t : full_order(grid_out, order)) {
    const TileRect rc = grid_out.rect(t);
    auto xd = tile_features<QDeformedFeatures>(
        offs, rc, x.channels, [&](std::size_t c, Coord at) { return q_bli_sample(x, c, at); });
    xd.frac_bits = x.frac_bits;
    const AccTensor part = q_conv_deformed_acc(xd, main_layer);
    for (std::size_t l = 0; l < acc.channels; ++l) {
      for (std::size_t r = rc.row_begin; r < rc.row_end; ++r) {
        for (std::size_t s = rc.col_begin; s < rc.col_end; ++s) {
          acc.acc[(l * acc.height + r) * acc.width + s] =
              part.acc[(l * rc.rows() + r - rc.row_begin) * rc.cols() + s - rc.col_begin];
        }
      }
    }
  }
  // The output scale needs the whole layer's accumulator range.
  return requantize(acc);
}

}  // namespace dcnsim
