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

// Experiment drivers behind the command-line tool. Each run owns its output
// directory; nothing is shared between runs.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dcnsim/config.hpp"
#include "dcnsim/simulate.hpp"

namespace dcnsim {

SimReport simulate(const ExperimentConfig& cfg);

/// Writes report.json, traces/<layer>.trace and tdt/<layer>.tdt under out_dir.
SimReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct AblationRow {
  SchedulePolicy policy = SchedulePolicy::kTdtSched;
  std::size_t loads = 0;
  std::uint64_t tile_read_bytes = 0;
  std::uint64_t dram_bytes = 0;
  std::uint64_t total_cycles = 0;
  double energy_mj = 0.0;
};

struct SchedulerAblation {
  std::string network;
  std::vector<AblationRow> rows;  // naive, tdt_only, tdt_sched
  double reduction_vs_tdt_only_pct = 0.0;
  double reduction_vs_naive_pct = 0.0;
  static constexpr double kReferenceReductionPct = 40.7;

  const AblationRow& row(SchedulePolicy p) const;
};

/// One offset realization, three policies.
SchedulerAblation ablate_scheduler(const ExperimentConfig& cfg);

struct SweepRow {
  std::size_t tile_size = 0;
  bool feasible = false;
  std::string note;
  std::size_t loads = 0;
  std::uint64_t tile_read_bytes = 0;
  std::uint64_t dram_bytes = 0;
  double energy_mj = 0.0;
  double normalized_energy = 0.0;  // relative to the smallest feasible size
};

struct TileSweep {
  std::string network;
  std::uint64_t budget_bytes = 0;
  std::vector<SweepRow> rows;
  /// Feasible size with the fewest feature-tile read bytes.
  std::optional<std::size_t> best_size;
};

/// Largest spatial extent of any layer input; the "full map" tile size.
std::size_t full_map_extent(const NetworkSpec& net);
/// 2, 4, 8, ... below the full map, then the full map.
std::vector<std::size_t> default_tile_sizes(const NetworkSpec& net);

/// Byte budget = 25% of the largest layer input map; M = floor(budget / tile bytes)
/// per layer. A size is infeasible when some layer cannot hold one tile.
TileSweep sweep_tile_size(const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes);

struct FusionSide {
  std::uint64_t compute_cycles = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t intermediate_bytes = 0;
  std::uint64_t dram_bytes = 0;
  double energy_mj = 0.0;
};

struct FusionLayerDelta {
  std::string name;
  std::uint64_t deformed_bytes = 0;      // |x'|
  std::uint64_t intermediate_saved = 0;  // unfused minus fused intermediate traffic
};

struct FusionAblation {
  std::string network;
  FusionSide fused;
  FusionSide unfused;
  std::vector<FusionLayerDelta> layers;
};

FusionAblation ablate_fusion(const ExperimentConfig& cfg);

}  // namespace dcnsim
