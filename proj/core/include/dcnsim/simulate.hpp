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

// End-to-end network model: per layer, offset conv, TDT construction, tile
// scheduling, BLI and the main conv, with DRAM transfers overlapped against
// compute per output tile.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcnsim/accel.hpp"
#include "dcnsim/dram.hpp"
#include "dcnsim/network.hpp"
#include "dcnsim/scheduler.hpp"

namespace dcnsim {

/// How the input-tile capacity M of a layer is derived.
struct CapacityRule {
  enum class Kind { kTiles, kFraction, kBytes };
  Kind kind = Kind::kBytes;
  std::size_t tiles = 0;       // kTiles: M, strict
  double fraction = 0.0;       // kFraction: M = ceil(fraction * n_in), streaming
  std::uint64_t bytes = 0;     // kBytes: M = floor(bytes / largest tile), streaming

  static CapacityRule of_tiles(std::size_t m) { return {Kind::kTiles, m, 0.0, 0}; }
  static CapacityRule of_fraction(double f) { return {Kind::kFraction, 0, f, 0}; }
  static CapacityRule of_bytes(std::uint64_t b) { return {Kind::kBytes, 0, 0.0, b}; }

  /// Throws InfeasibleError when the rule leaves no room for a single tile.
  std::size_t resolve(std::size_t n_in, std::uint64_t largest_tile_bytes) const;
  OversizeMode oversize() const noexcept {
    return kind == Kind::kTiles ? OversizeMode::kError : OversizeMode::kStream;
  }
};

struct SimOptions {
  AcceleratorConfig accel;
  DramConfig dram;
  DramPowerModel power;
  std::size_t tile_rows = 5;
  std::size_t tile_cols = 5;
  /// When non-zero, square input tiles of this edge replace the tile_rows x tile_cols grid.
  std::size_t tile_size = 0;
  CapacityRule capacity = CapacityRule::of_bytes(128 * 1024);
  SchedulePolicy policy = SchedulePolicy::kTdtSched;
  bool fusion = true;
  std::uint64_t seed = 1;
  double skew = 2.0;
  /// Also schedule with the other two policies and report their load counts.
  bool all_policies = true;
  /// Keep the trace and TDT bitmap text of each deformable layer.
  bool keep_artifacts = false;
};

struct PolicyLoads {
  std::size_t naive = 0;
  std::size_t tdt_only = 0;
  std::size_t tdt_sched = 0;

  std::size_t of(SchedulePolicy p) const noexcept;
  PolicyLoads& operator+=(const PolicyLoads& o) noexcept;
};

struct LayerReport {
  std::size_t index = 0;
  std::string name;
  std::optional<DcnVariant> variant;
  std::size_t in_channels = 0, in_height = 0, in_width = 0;
  std::size_t out_channels = 0, out_height = 0, out_width = 0;
  std::vector<StageTiming> stages;
  std::uint64_t compute_cycles = 0;
  std::uint64_t dram_cycles = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t stall_cycles = 0;
  TrafficLedger traffic;

  // Deformable layers only.
  std::size_t grid_rows = 0, grid_cols = 0;
  std::size_t tiles_in = 0, tiles_out = 0;
  std::size_t capacity = 0;
  std::size_t max_row_tiles = 0;
  std::uint64_t largest_tile_bytes = 0;
  std::uint64_t deformed_samples = 0;
  std::uint64_t deformed_bytes = 0;  // |x'|
  std::uint64_t tile_read_bytes = 0;
  std::size_t loads = 0;
  std::size_t evictions = 0;
  std::size_t streamed_steps = 0;
  std::optional<PolicyLoads> policy_loads;
  double access_cv = 0.0;
  std::string trace_text;
  std::string tdt_bitmap;

  bool deformable() const noexcept { return variant.has_value(); }
};

struct SimReport {
  std::string network;
  SimOptions options;
  std::vector<LayerReport> layers;
  std::uint64_t compute_cycles = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t tile_read_bytes = 0;
  std::size_t loads = 0;
  std::optional<PolicyLoads> policy_loads;
  double runtime_s = 0.0;
  TrafficLedger traffic;
  EnergyReport energy;
};

/// Input and output tile grids of a deformable layer under `opt`.
struct LayerGrids {
  TileGrid in;
  TileGrid out;
};
LayerGrids layer_grids(const LayerSpec& layer, const SimOptions& opt);

/// Offsets the model uses for layer `index` (gen_offsets with the run's seed and skew).
OffsetField layer_offsets(const LayerSpec& layer, std::size_t index, const SimOptions& opt);

/// Throws ConfigError for inconsistent specs and InfeasibleError when a strict
/// capacity cannot hold a tile's working set.
SimReport run_network(const NetworkSpec& net, const SimOptions& opt);

}  // namespace dcnsim
