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

#include "dcnsim/report.hpp"

#include <chrono>
#include <ctime>

#include "dcnsim/errors.hpp"
#include "json.hpp"

namespace dcnsim {
namespace {

using Json = nlohmann::ordered_json;

Json traffic_json(const TrafficLedger& l) {
  Json bytes = Json::object();
  Json reads = Json::object();
  Json writes = Json::object();
  for (std::size_t k = 0; k < kTrafficCategories; ++k) {
    const auto t = static_cast<Traffic>(k);
    const std::string name(to_string(t));
    bytes[name] = l.bytes(t);
    reads[name] = l.read(t);
    writes[name] = l.written(t);
  }
  return Json{{"bytes", bytes},
              {"read_bytes", reads},
              {"write_bytes", writes},
              {"total_bytes", l.total()},
              {"activations", l.activations}};
}

Json energy_obj(const EnergyReport& e) {
  return Json{{"unit", "mJ"},
              {"dram_read", e.read_mj},
              {"dram_write", e.write_mj},
              {"dram_activate", e.activation_mj},
              {"dram_background", e.background_mj},
              {"dram_total", e.total_mj},
              {"core", "not modeled"}};
}

Json loads_json(const PolicyLoads& p) {
  return Json{{"naive", p.naive}, {"tdt_only", p.tdt_only}, {"tdt_sched", p.tdt_sched}};
}

Json capacity_json(const CapacityRule& c) {
  switch (c.kind) {
    case CapacityRule::Kind::kTiles:
      return Json{{"rule", "tiles"}, {"tiles", c.tiles}};
    case CapacityRule::Kind::kFraction:
      return Json{{"rule", "fraction"}, {"fraction", c.fraction}};
    case CapacityRule::Kind::kBytes:
      break;
  }
  return Json{{"rule", "bytes"}, {"bytes", c.bytes}};
}

Json layer_json(const LayerReport& l) {
  Json j;
  j["index"] = l.index;
  j["name"] = l.name;
  j["type"] = l.deformable() ? std::string(to_string(*l.variant)) : std::string("conv");
  j["input"] = {l.in_channels, l.in_height, l.in_width};
  j["output"] = {l.out_channels, l.out_height, l.out_width};
  Json stages = Json::array();
  for (const auto& s : l.stages) {
    stages.push_back(Json{{"stage", std::string(to_string(s.stage))},
                          {"compute_cycles", s.compute_cycles},
                          {"buffer_read_cycles", s.buffer_read_cycles},
                          {"dram_cycles", s.dram_cycles}});
  }
  j["stages"] = stages;
  j["compute_cycles"] = l.compute_cycles;
  j["dram_cycles"] = l.dram_cycles;
  j["total_cycles"] = l.total_cycles;
  j["stall_cycles"] = l.stall_cycles;
  j["dram"] = traffic_json(l.traffic);
  if (l.deformable()) {
    j["tiles"] = Json{{"grid", {l.grid_rows, l.grid_cols}},
                      {"inputs", l.tiles_in},
                      {"outputs", l.tiles_out},
                      {"capacity", l.capacity},
                      {"max_row_tiles", l.max_row_tiles},
                      {"largest_tile_bytes", l.largest_tile_bytes}};
    j["deformed_samples"] = l.deformed_samples;
    j["deformed_bytes"] = l.deformed_bytes;
    j["tile_read_bytes"] = l.tile_read_bytes;
    j["loads"] = l.loads;
    j["evictions"] = l.evictions;
    j["streamed_steps"] = l.streamed_steps;
    if (l.policy_loads) j["tile_loads"] = loads_json(*l.policy_loads);
    j["access_tile_cv"] = l.access_cv;
  }
  return j;
}

std::string dump(Json& j, std::string_view generated_at) {
  j["generated_at"] = std::string(generated_at);
  return j.dump(2) + "\n";
}

std::uint64_t get_u64(const Json& obj, const char* key) {
  if (!obj.contains(key)) return 0;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(std::string("ledger field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string report_json(const SimReport& r, std::string_view generated_at) {
  const SimOptions& o = r.options;
  Json j;
  j["network"] = r.network;
  j["config"] = Json{{"policy", std::string(to_string(o.policy))},
                     {"fusion", o.fusion},
                     {"seed", o.seed},
                     {"skew", o.skew},
                     {"tile_grid", {o.tile_rows, o.tile_cols}},
                     {"tile_size", o.tile_size},
                     {"capacity", capacity_json(o.capacity)},
                     {"pe_array", {o.accel.pe_rows, o.accel.pe_cols}},
                     {"clock_hz", o.accel.clock_hz},
                     {"dram_bandwidth", o.accel.dram_bandwidth}};
  Json layers = Json::array();
  for (const auto& l : r.layers) layers.push_back(layer_json(l));
  j["layers"] = layers;
  Json totals;
  totals["compute_cycles"] = r.compute_cycles;
  totals["total_cycles"] = r.total_cycles;
  totals["runtime_s"] = r.runtime_s;
  totals["loads"] = r.loads;
  totals["tile_read_bytes"] = r.tile_read_bytes;
  if (r.policy_loads) totals["tile_loads"] = loads_json(*r.policy_loads);
  totals["dram"] = traffic_json(r.traffic);
  j["totals"] = totals;
  j["energy"] = energy_obj(r.energy);
  return dump(j, generated_at);
}

std::string ablation_json(const SchedulerAblation& a, std::string_view generated_at) {
  Json j;
  j["network"] = a.network;
  Json rows = Json::array();
  for (const auto& r : a.rows) {
    rows.push_back(Json{{"policy", std::string(to_string(r.policy))},
                        {"tile_loads", r.loads},
                        {"tile_read_bytes", r.tile_read_bytes},
                        {"dram_bytes", r.dram_bytes},
                        {"total_cycles", r.total_cycles},
                        {"energy_mj", r.energy_mj}});
  }
  j["policies"] = rows;
  j["reduction_vs_tdt_only_pct"] = a.reduction_vs_tdt_only_pct;
  j["reduction_vs_naive_pct"] = a.reduction_vs_naive_pct;
  j["reference_reduction_pct"] = SchedulerAblation::kReferenceReductionPct;
  return dump(j, generated_at);
}

std::string sweep_json(const TileSweep& s, std::string_view generated_at) {
  Json j;
  j["network"] = s.network;
  j["budget_bytes"] = s.budget_bytes;
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    Json row{{"tile_size", r.tile_size}, {"feasible", r.feasible}};
    if (r.feasible) {
      row["tile_loads"] = r.loads;
      row["tile_read_bytes"] = r.tile_read_bytes;
      row["dram_bytes"] = r.dram_bytes;
      row["energy_mj"] = r.energy_mj;
      row["normalized_energy"] = r.normalized_energy;
    } else {
      row["note"] = r.note;
    }
    rows.push_back(row);
  }
  j["sizes"] = rows;
  j["best_tile_size"] = s.best_size ? Json(*s.best_size) : Json(nullptr);
  return dump(j, generated_at);
}

std::string fusion_json(const FusionAblation& f, std::string_view generated_at) {
  auto side = [](const FusionSide& s) {
    return Json{{"compute_cycles", s.compute_cycles},
                {"total_cycles", s.total_cycles},
                {"intermediate_bytes", s.intermediate_bytes},
                {"dram_bytes", s.dram_bytes},
                {"energy_mj", s.energy_mj}};
  };
  Json j;
  j["network"] = f.network;
  j["fused"] = side(f.fused);
  j["unfused"] = side(f.unfused);
  Json layers = Json::array();
  for (const auto& l : f.layers) {
    layers.push_back(Json{{"name", l.name},
                          {"deformed_bytes", l.deformed_bytes},
                          {"intermediate_saved", l.intermediate_saved}});
  }
  j["layers"] = layers;
  return dump(j, generated_at);
}

std::string ledger_json(const TrafficLedger& l, double runtime_s) {
  Json reads = Json::object();
  Json writes = Json::object();
  for (std::size_t k = 0; k < kTrafficCategories; ++k) {
    const std::string name(to_string(static_cast<Traffic>(k)));
    reads[name] = l.read_bytes[k];
    writes[name] = l.write_bytes[k];
  }
  Json j{{"read_bytes", reads}, {"write_bytes", writes}, {"runtime_s", runtime_s}};
  return j.dump(2) + "\n";
}

LedgerFile parse_ledger_json(std::string_view text, const DramConfig& dram) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ledger is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("ledger must be a JSON object");
  LedgerFile f;
  for (const char* dir : {"read_bytes", "write_bytes"}) {
    if (!j.contains(dir)) continue;
    if (!j[dir].is_object()) throw ConfigError(std::string("ledger field '") + dir + "' must be an object");
    for (const auto& [key, value] : j[dir].items()) {
      bool known = false;
      for (std::size_t k = 0; k < kTrafficCategories; ++k) known |= key == to_string(static_cast<Traffic>(k));
      if (!known) throw ConfigError("unknown traffic category '" + key + "' in " + dir);
    }
  }
  for (std::size_t k = 0; k < kTrafficCategories; ++k) {
    const std::string name(to_string(static_cast<Traffic>(k)));
    if (j.contains("read_bytes")) f.ledger.read_bytes[k] = get_u64(j["read_bytes"], name.c_str());
    if (j.contains("write_bytes")) f.ledger.write_bytes[k] = get_u64(j["write_bytes"], name.c_str());
  }
  if (!j.contains("runtime_s") || !j["runtime_s"].is_number()) {
    throw ConfigError("ledger needs a numeric runtime_s");
  }
  f.runtime_s = j["runtime_s"].get<double>();
  f.ledger.finalize(dram, f.runtime_s);
  auto time_field = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw ConfigError(std::string("ledger field '") + key + "' must be a number");
    out = j[key].get<double>();
  };
  time_field("active_read_s", f.ledger.active_read_s);
  time_field("active_write_s", f.ledger.active_write_s);
  time_field("activation_s", f.ledger.activation_s);
  return f;
}

std::string energy_json(const EnergyReport& e) {
  Json j = energy_obj(e);
  j["runtime_s"] = e.runtime_s;
  return j.dump(2) + "\n";
}

}  // namespace dcnsim
