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

// Structural and timing model of the datapath: PE array whose 2x2 clusters each
// evaluate one bilinear sample, the parity-banked input buffer with its address
// converter, stage cycle counts, and the fused BLI + conv execution order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dcnsim/deform.hpp"
#include "dcnsim/quantize.hpp"
#include "dcnsim/tensor.hpp"
#include "dcnsim/tiling.hpp"

namespace dcnsim {

struct AcceleratorConfig {
  std::size_t pe_rows = 16;
  std::size_t pe_cols = 32;
  double clock_hz = 8.0e8;
  std::size_t in_buf = 128 * 1024;
  std::size_t out_buf = 256 * 1024;
  std::size_t weight_buf = 256 * 1024;
  std::size_t index_buf = 32 * 1024;
  std::size_t inst_buf = 64 * 1024;
  std::size_t bytes_per_element = 1;
  double dram_bandwidth = 4.0e9;  // bytes per second
  std::size_t pipeline_fill = 4;  // address converter + coefficient pipeline
  std::size_t index_bytes = 2;    // one Q8 coordinate component

  std::size_t pe_count() const noexcept { return pe_rows * pe_cols; }
  std::size_t clusters() const noexcept { return pe_count() / 4; }
  /// Channels packed into one bank word (A / 4).
  std::size_t lanes() const noexcept { return pe_count() / 4; }
  /// Cycles to move `bytes` over the DRAM interface.
  std::uint64_t transfer_cycles(std::uint64_t bytes) const noexcept;

  /// Throws ConfigError when the PE count is not a positive multiple of 4 or a size is zero.
  void validate() const;
};

/// Bank of a feature: (row mod 2) * 2 + (col mod 2).
enum class Bank : std::uint8_t { kEvenEven = 0, kEvenOdd = 1, kOddEven = 2, kOddOdd = 3 };

inline Bank bank_of(std::size_t row, std::size_t col) noexcept {
  return static_cast<Bank>((row % 2) * 2 + (col % 2));
}

struct BankAddress {
  Bank bank = Bank::kEvenEven;
  std::int64_t offset = 0;  // bank word index relative to t0
  std::int64_t t0 = 0;
  std::size_t row = 0;
  std::size_t col = 0;
};

/// Input features split into four parity banks. Each bank word holds `lanes`
/// channels; word ((col/2) * half_height + row/2) * groups + c / lanes.
class ParityBanks {
 public:
  struct Slot {
    Bank bank = Bank::kEvenEven;
    std::size_t element = 0;
  };

  std::size_t channels() const noexcept { return channels_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t lanes() const noexcept { return lanes_; }
  /// ceil(H / 2): odd heights are padded by one row.
  std::size_t half_height() const noexcept { return (height_ + 1) / 2; }
  /// ceil(C / lanes)
  std::size_t groups() const noexcept { return (channels_ + lanes_ - 1) / lanes_; }
  std::size_t words_per_bank() const noexcept;
  const std::vector<double>& bank(Bank b) const noexcept {
    return banks_[static_cast<std::size_t>(b)];
  }

  Slot locate(std::size_t c, std::size_t r, std::size_t s) const noexcept;
  /// Inverse placement; nullopt for padding slots.
  std::optional<std::array<std::size_t, 3>> feature_at(Bank b, std::size_t element) const noexcept;
  double value(std::size_t c, std::size_t r, std::size_t s) const noexcept;
  /// Reads channel c through a converted address.
  double fetch(const BankAddress& a, std::size_t c) const noexcept;

 private:
  friend ParityBanks partition_parity_banks(const Tensor3D& x, std::size_t pe_count);

  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t lanes_ = 1;
  std::array<std::vector<double>, 4> banks_;
};

/// pe_count must be a positive multiple of 4. Throws ConfigError otherwise.
ParityBanks partition_parity_banks(const Tensor3D& x, std::size_t pe_count);

/// Bank word of feature (row, col) for channel group 0, before subtracting T0.
std::int64_t bank_word(std::size_t row, std::size_t col, std::size_t height, std::size_t channels,
                       std::size_t pe_count) noexcept;

/// T0 of a resident tile: the bank word of its origin.
std::int64_t tile_base_index(const TileRect& tile, std::size_t height, std::size_t channels,
                             std::size_t pe_count) noexcept;

/// Four neighbour addresses in the order lb (floor, floor), rb (ceil row, floor col),
/// lt (floor row, ceil col), rt (ceil, ceil).
std::array<BankAddress, 4> address_convert(Coord at, std::size_t height, std::size_t channels,
                                           std::size_t pe_count, std::int64_t t0 = 0) noexcept;

enum class Stage { kConv, kOffsetConv, kBli, kMainConv };
std::string_view to_string(Stage s) noexcept;

struct StageTiming {
  Stage stage = Stage::kConv;
  std::uint64_t compute_cycles = 0;
  std::uint64_t buffer_read_cycles = 0;
  std::uint64_t dram_cycles = 0;
};

/// ceil(n_deformed * C / clusters) + fill; one bank read of all four neighbours
/// feeds `lanes` channels, so buffer reads take n_deformed * ceil(C / lanes) cycles.
StageTiming bli_stage_cycles(std::uint64_t n_deformed, std::size_t channels,
                             const AcceleratorConfig& cfg);

/// ceil(MACs / PEs) + pe_rows + pe_cols.
StageTiming conv_stage_cycles(std::uint64_t macs, const AcceleratorConfig& cfg,
                              Stage stage = Stage::kConv);
StageTiming conv_stage_cycles(const ConvLayerSpec& layer, std::size_t out_height,
                              std::size_t out_width, const AcceleratorConfig& cfg,
                              Stage stage = Stage::kConv);

/// BLI and the main conv executed output tile by output tile in `order`; deformed
/// features of one tile never leave the chip. Bit-identical to deformable_conv.
Tensor3D fused_deformable_conv(const Tensor3D& x, const OffsetField& offs,
                               const ConvLayerSpec& main_layer, const TileGrid& grid_out,
                               std::span<const std::size_t> order);
QTensor q_fused_deformable_conv(const QTensor& x, const OffsetField& offs,
                                const QConvLayer& main_layer, const TileGrid& grid_out,
                                std::span<const std::size_t> order);

}  // namespace dcnsim
