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

// Bit-vector tile scheduler. Three policies share one buffer model: a FIFO of
// resident input tiles with capacity M whose victim is the oldest tile the
// executing unit does not need.

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcnsim/bitvec.hpp"
#include "dcnsim/tiling.hpp"

namespace dcnsim {

enum class SchedulePolicy { kNaive, kTdtOnly, kTdtSched };

std::string_view to_string(SchedulePolicy p) noexcept;
/// "naive", "tdt_only", "tdt_sched" (dashes accepted). Throws ConfigError.
SchedulePolicy parse_policy(std::string_view name);

/// What to do with a unit whose working set exceeds M.
enum class OversizeMode {
  kError,   // InfeasibleError naming the output tile
  kStream,  // consume the unit's input tiles one at a time
};

struct SchedulerState {
  BitVector os;  // pending output tiles
  BitVector oc;  // input tiles on chip
  std::size_t capacity = 0;
  std::deque<std::size_t> fifo;  // resident tiles, oldest first
  std::vector<std::size_t> tr;   // reuse counts of the last selection

  SchedulerState() = default;
  SchedulerState(std::size_t n_out, std::size_t n_in, std::size_t m)
      : os(n_out), oc(n_in), capacity(m), tr(n_out, 0) {}
};

struct TraceStep {
  std::size_t step = 0;
  std::size_t output_tile = 0;
  std::vector<std::size_t> loads;      // in load order
  std::vector<std::size_t> evictions;  // in eviction order
  std::vector<std::size_t> reuses;     // resident hits, ascending, each tile once
  bool streamed = false;
};

struct ScheduleResult {
  SchedulePolicy policy = SchedulePolicy::kTdtSched;
  std::size_t capacity = 0;
  std::vector<std::size_t> oid;
  std::vector<std::vector<std::size_t>> iid;
  std::size_t loads = 0;
  std::size_t evictions = 0;
  std::size_t streamed_steps = 0;
  std::vector<TraceStep> trace;
};

/// Pending tile maximising popcount(B[curr] & B[i]); without `curr`, the pending
/// row with the most input tiles. Ties go to the lowest ID. Fills state.tr.
std::size_t next_output_tile(SchedulerState& state, const TileDependencyTable& tdt,
                             std::optional<std::size_t> curr);

/// Input order for the tile about to execute (`target` is its row). Resident tiles
/// first, then tiles only it needs, then those the successor (`lookahead`) also
/// needs, so they are the newest in the FIFO. Ascending within each part.
std::vector<std::size_t> order_input_tiles(const BitVector& target, const BitVector& lookahead,
                                           const BitVector& oc);

/// Row form: B[next] is the target and B[curr] the lookahead.
inline std::vector<std::size_t> order_input_tiles(std::size_t curr, std::size_t next,
                                                  const BitVector& oc,
                                                  const TileDependencyTable& tdt) {
  return order_input_tiles(tdt.row(next), tdt.row(curr), oc);
}

struct ScheduleOptions {
  /// Per-output-feature dependency sets for the naive policy. Without them each
  /// set bit of a row is treated as a feature that needs that one tile.
  const FeatureDependencies* features = nullptr;
  OversizeMode oversize = OversizeMode::kError;
};

/// Throws ConfigError for M == 0 or a feature table that does not match the TDT,
/// InfeasibleError for an oversize unit in kError mode.
ScheduleResult run_schedule(const TileDependencyTable& tdt, std::size_t capacity,
                            SchedulePolicy policy, const ScheduleOptions& options = {});

/// One line per step: `step, outputTile, loads=[...], evictions=[...], reuses=[...]`.
std::string format_trace(const ScheduleResult& result);

}  // namespace dcnsim
