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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "dcnsim/deform.hpp"
#include "dcnsim/scheduler.hpp"
#include "dcnsim/simulate.hpp"

namespace dcnsim {

struct ExperimentConfig {
  std::string network = "tiny-VGG19-F";
  DcnVariant variant = DcnVariant::kWindow;
  std::size_t tile_rows = 5;
  std::size_t tile_cols = 5;
  std::size_t tile_size = 0;         // square input tiles; 0 = use the grid
  std::size_t buffer_tiles = 0;      // strict M when non-zero
  double buffer_fraction = 0.0;      // else M = ceil(f * n_in) when non-zero
  std::uint64_t buffer_bytes = 0;    // else a byte budget; 0 = input buffer size
  SchedulePolicy policy = SchedulePolicy::kTdtSched;
  bool fusion = true;
  std::uint64_t seed = 1;
  double skew = 2.0;

  bool operator==(const ExperimentConfig&) const = default;
};

/// `key = value` lines; '#' starts a comment; strings may be quoted.
/// Throws ConfigError naming the line for unknown keys or bad values.
ExperimentConfig parse_config(std::string_view text);
std::string serialize_config(const ExperimentConfig& cfg);
/// Reads a file, then applies environment overrides.
ExperimentConfig load_config(const std::filesystem::path& path);
/// DCNSIM_SEED replaces the seed when set.
void apply_env_overrides(ExperimentConfig& cfg);

SimOptions to_sim_options(const ExperimentConfig& cfg);

}  // namespace dcnsim
