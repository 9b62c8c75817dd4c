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

#include <string>
#include <string_view>

#include "dcnsim/dram.hpp"
#include "dcnsim/experiment.hpp"
#include "dcnsim/simulate.hpp"

namespace dcnsim {

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

// Deterministic JSON documents; only `generated_at` varies between identical runs.
std::string report_json(const SimReport& report, std::string_view generated_at);
std::string ablation_json(const SchedulerAblation& a, std::string_view generated_at);
std::string sweep_json(const TileSweep& s, std::string_view generated_at);
std::string fusion_json(const FusionAblation& f, std::string_view generated_at);

struct LedgerFile {
  TrafficLedger ledger;
  double runtime_s = 0.0;
};

/// {"read_bytes": {category: n}, "write_bytes": {...}, "runtime_s": t}. Optional
/// active_read_s / active_write_s / activation_s override the times derived from bytes.
std::string ledger_json(const TrafficLedger& ledger, double runtime_s);
LedgerFile parse_ledger_json(std::string_view text, const DramConfig& dram);
std::string energy_json(const EnergyReport& e);

}  // namespace dcnsim
