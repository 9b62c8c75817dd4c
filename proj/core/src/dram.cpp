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

#include "dcnsim/dram.hpp"

#include <cmath>
#include <string>

#include "dcnsim/errors.hpp"

namespace dcnsim {
namespace {

std::uint64_t sum(const std::array<std::uint64_t, kTrafficCategories>& a) noexcept {
  std::uint64_t s = 0;
  for (auto v : a) s += v;
  return s;
}

void add_fixed(TrafficLedger& l, const LayerIo& io, bool fused) {
  l.add_read(Traffic::kWeights, io.weight_bytes);
  l.add_read(Traffic::kInputs, io.input_bytes);
  l.add_write(Traffic::kOutputs, io.output_bytes);
  if (!fused) {
    l.add_write(Traffic::kIntermediate, io.intermediate_bytes);
    l.add_read(Traffic::kIntermediate, io.intermediate_bytes);
  }
  l.add_write(Traffic::kIndex, io.index_spill_bytes);
  l.add_read(Traffic::kIndex, io.index_spill_bytes);
}

}  // namespace

void DramPowerModel::validate() const {
  for (double p : {act_mw, rd_mw, wr_mw, read_io_mw, write_odt_mw, bg_mw}) {
    if (!(p > 0.0)) throw DomainError("DRAM power terms must be positive");
  }
}

std::string_view to_string(Traffic t) noexcept {
  switch (t) {
    case Traffic::kWeights:
      return "weights";
    case Traffic::kInputs:
      return "inputs";
    case Traffic::kOutputs:
      return "outputs";
    case Traffic::kIntermediate:
      return "intermediate";
    case Traffic::kIndex:
      return "index";
  }
  return "?";
}

std::uint64_t TrafficLedger::total_read() const noexcept { return sum(read_bytes); }
std::uint64_t TrafficLedger::total_write() const noexcept { return sum(write_bytes); }

void TrafficLedger::finalize(const DramConfig& dram, double runtime_s) {
  if (!(dram.bandwidth > 0.0) || dram.row_bytes == 0) {
    throw ConfigError("DRAM bandwidth and row size must be positive");
  }
  active_read_s = static_cast<double>(total_read()) / dram.bandwidth;
  active_write_s = static_cast<double>(total_write()) / dram.bandwidth;
  activations = 0;
  for (std::size_t k = 0; k < kTrafficCategories; ++k) {
    activations += (read_bytes[k] + dram.row_bytes - 1) / dram.row_bytes;
    activations += (write_bytes[k] + dram.row_bytes - 1) / dram.row_bytes;
  }
  activation_s = static_cast<double>(activations) * dram.t_rc_s;
  total_s = runtime_s;
}

TrafficLedger& TrafficLedger::operator+=(const TrafficLedger& o) noexcept {
  for (std::size_t k = 0; k < kTrafficCategories; ++k) {
    read_bytes[k] += o.read_bytes[k];
    write_bytes[k] += o.write_bytes[k];
  }
  active_read_s += o.active_read_s;
  active_write_s += o.active_write_s;
  activations += o.activations;
  activation_s += o.activation_s;
  total_s += o.total_s;
  return *this;
}

TrafficLedger tally_traffic(const ScheduleResult& schedule, std::uint64_t tile_bytes,
                            const LayerIo& io, bool fused) {
  TrafficLedger l;
  l.add_read(Traffic::kInputs, schedule.loads * tile_bytes);
  add_fixed(l, io, fused);
  return l;
}

TrafficLedger tally_traffic(const ScheduleResult& schedule,
                            std::span<const std::uint64_t> tile_bytes, const LayerIo& io,
                            bool fused) {
  TrafficLedger l;
  for (const auto& step : schedule.trace) {
    for (std::size_t t : step.loads) {
      if (t >= tile_bytes.size()) {
        throw ConfigError("schedule loads tile " + std::to_string(t) + " without a size");
      }
      l.add_read(Traffic::kInputs, tile_bytes[t]);
    }
  }
  add_fixed(l, io, fused);
  return l;
}

EnergyReport estimate_energy(const TrafficLedger& ledger, const DramPowerModel& power,
                             double runtime_s) {
  power.validate();
  if (ledger.active_read_s < 0.0 || ledger.active_write_s < 0.0 || ledger.activation_s < 0.0 ||
      runtime_s < 0.0) {
    throw DomainError("DRAM times must be non-negative");
  }
  if (runtime_s < ledger.active_read_s || runtime_s < ledger.active_write_s) {
    throw DomainError("runtime " + std::to_string(runtime_s) +
                      " s is shorter than the active DRAM time");
  }
  EnergyReport e;
  e.runtime_s = runtime_s;
  e.read_mj = (power.rd_mw + power.read_io_mw) * ledger.active_read_s;
  e.write_mj = (power.wr_mw + power.write_odt_mw) * ledger.active_write_s;
  e.activation_mj = power.act_mw * ledger.activation_s;
  e.background_mj = power.bg_mw * runtime_s;
  e.total_mj = e.read_mj + e.write_mj + e.activation_mj + e.background_mj;
  return e;
}

}  // namespace dcnsim
