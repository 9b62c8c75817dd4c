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
#include <string_view>

#include "dcnsim/scheduler.hpp"

namespace dcnsim {

/// Per-operation DRAM power in milliwatts.
struct DramPowerModel {
  double act_mw = 63.7;
  double rd_mw = 52.1;
  double wr_mw = 52.1;
  double read_io_mw = 32.7;
  double write_odt_mw = 136.1;
  double bg_mw = 67.7;

  /// Throws DomainError unless every term is positive.
  void validate() const;
};

struct DramConfig {
  double bandwidth = 4.0e9;     // bytes per second
  std::size_t row_bytes = 2048;  // one activation per row crossing
  double t_rc_s = 48.75e-9;     // time charged per activation
};

enum class Traffic : std::size_t { kWeights, kInputs, kOutputs, kIntermediate, kIndex };
inline constexpr std::size_t kTrafficCategories = 5;
std::string_view to_string(Traffic t) noexcept;

struct TrafficLedger {
  std::array<std::uint64_t, kTrafficCategories> read_bytes{};
  std::array<std::uint64_t, kTrafficCategories> write_bytes{};
  double active_read_s = 0.0;
  double active_write_s = 0.0;
  std::uint64_t activations = 0;
  double activation_s = 0.0;
  double total_s = 0.0;

  void add_read(Traffic t, std::uint64_t bytes) noexcept {
    read_bytes[static_cast<std::size_t>(t)] += bytes;
  }
  void add_write(Traffic t, std::uint64_t bytes) noexcept {
    write_bytes[static_cast<std::size_t>(t)] += bytes;
  }
  std::uint64_t read(Traffic t) const noexcept { return read_bytes[static_cast<std::size_t>(t)]; }
  std::uint64_t written(Traffic t) const noexcept {
    return write_bytes[static_cast<std::size_t>(t)];
  }
  std::uint64_t bytes(Traffic t) const noexcept { return read(t) + written(t); }
  std::uint64_t total_read() const noexcept;
  std::uint64_t total_write() const noexcept;
  std::uint64_t total() const noexcept { return total_read() + total_write(); }

  /// Derives active and activation times from the byte counts and sets total_s.
  void finalize(const DramConfig& dram, double runtime_s);
  TrafficLedger& operator+=(const TrafficLedger& o) noexcept;
  bool operator==(const TrafficLedger&) const = default;
};

/// Byte sizes of one layer's fixed transfers.
struct LayerIo {
  std::uint64_t weight_bytes = 0;
  std::uint64_t output_bytes = 0;
  /// |x'|: deformed features, written and read back when the layer is not fused.
  std::uint64_t intermediate_bytes = 0;
  /// Coordinates that spill out of the index buffer (written and read back).
  std::uint64_t index_spill_bytes = 0;
  /// Input map read by the offset conv.
  std::uint64_t input_bytes = 0;
};

/// Input-tile reads = loads x tile_bytes, plus the layer's fixed traffic.
TrafficLedger tally_traffic(const ScheduleResult& schedule, std::uint64_t tile_bytes,
                            const LayerIo& io, bool fused);
/// Same, with per-input-tile sizes for grids whose edge tiles are smaller.
TrafficLedger tally_traffic(const ScheduleResult& schedule,
                            std::span<const std::uint64_t> tile_bytes, const LayerIo& io,
                            bool fused);

struct EnergyReport {
  double read_mj = 0.0;
  double write_mj = 0.0;
  double activation_mj = 0.0;
  double background_mj = 0.0;
  double total_mj = 0.0;
  double runtime_s = 0.0;
};

/// E = (rd + read_io) * t_read + (wr + write_odt) * t_write + act * t_act + bg * runtime,
/// mW x s = mJ. Throws DomainError for negative times or a runtime shorter than the
/// active read or write time.
EnergyReport estimate_energy(const TrafficLedger& ledger, const DramPowerModel& power,
                             double runtime_s);

}  // namespace dcnsim
