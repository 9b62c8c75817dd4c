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

#include "dcnsim/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "dcnsim/errors.hpp"
#include "dcnsim/network.hpp"
#include "dcnsim/report.hpp"

namespace dcnsim {
namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + p.string());
}

std::string layer_stem(const LayerReport& l) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "L%02zu_", l.index);
  return buf + l.name;
}

}  // namespace

SimReport simulate(const ExperimentConfig& cfg) {
  return run_network(load_benchmark(cfg.network, cfg.variant), to_sim_options(cfg));
}

SimReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  SimOptions opt = to_sim_options(cfg);
  opt.keep_artifacts = true;
  SimReport rep = run_network(load_benchmark(cfg.network, cfg.variant), opt);
  std::filesystem::create_directories(out_dir / "traces");
  std::filesystem::create_directories(out_dir / "tdt");
  write_file(out_dir / "config.toml", serialize_config(cfg));
  write_file(out_dir / "report.json", report_json(rep, utc_timestamp()));
  for (const auto& l : rep.layers) {
    if (!l.deformable()) continue;
    write_file(out_dir / "traces" / (layer_stem(l) + ".trace"), l.trace_text);
    write_file(out_dir / "tdt" / (layer_stem(l) + ".tdt"), l.tdt_bitmap);
  }
  return rep;
}

const AblationRow& SchedulerAblation::row(SchedulePolicy p) const {
  for (const auto& r : rows) {
    if (r.policy == p) return r;
  }
  throw ConfigError("ablation has no row for " + std::string(to_string(p)));
}

SchedulerAblation ablate_scheduler(const ExperimentConfig& cfg) {
  const NetworkSpec net = load_benchmark(cfg.network, cfg.variant);
  SchedulerAblation a;
  a.network = net.name;
  for (auto p : {SchedulePolicy::kNaive, SchedulePolicy::kTdtOnly, SchedulePolicy::kTdtSched}) {
    SimOptions opt = to_sim_options(cfg);
    opt.policy = p;
    opt.all_policies = false;
    const SimReport rep = run_network(net, opt);
    a.rows.push_back({p, rep.loads, rep.tile_read_bytes, rep.traffic.total(), rep.total_cycles,
                      rep.energy.total_mj});
  }
  auto pct = [](double base, double v) { return base > 0.0 ? 100.0 * (base - v) / base : 0.0; };
  const auto& sched = a.row(SchedulePolicy::kTdtSched);
  a.reduction_vs_tdt_only_pct = pct(static_cast<double>(a.row(SchedulePolicy::kTdtOnly).loads),
                                    static_cast<double>(sched.loads));
  a.reduction_vs_naive_pct = pct(static_cast<double>(a.row(SchedulePolicy::kNaive).loads),
                                 static_cast<double>(sched.loads));
  return a;
}

std::size_t full_map_extent(const NetworkSpec& net) {
  std::size_t m = 1;
  for (const auto& l : net.layers) m = std::max({m, l.in_height, l.in_width});
  return m;
}

std::vector<std::size_t> default_tile_sizes(const NetworkSpec& net) {
  const std::size_t full = full_map_extent(net);
  std::vector<std::size_t> sizes;
  for (std::size_t s = 2; s < full; s *= 2) sizes.push_back(s);
  sizes.push_back(full);
  return sizes;
}

TileSweep sweep_tile_size(const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes) {
  const NetworkSpec net = load_benchmark(cfg.network, cfg.variant);
  TileSweep sw;
  sw.network = net.name;
  const SimOptions base = to_sim_options(cfg);
  std::uint64_t largest = 0;
  for (const auto& l : net.layers) {
    largest = std::max<std::uint64_t>(
        largest, std::uint64_t{l.in_channels} * l.in_height * l.in_width * base.accel.bytes_per_element);
  }
  sw.budget_bytes = largest / 4;
  for (std::size_t size : sizes) {
    if (size == 0) throw ConfigError("tile size must be positive");
    SweepRow row;
    row.tile_size = size;
    SimOptions opt = base;
    opt.tile_size = size;
    opt.capacity = CapacityRule::of_bytes(sw.budget_bytes);
    opt.all_policies = false;
    try {
      const SimReport rep = run_network(net, opt);
      row.feasible = true;
      row.loads = rep.loads;
      row.tile_read_bytes = rep.tile_read_bytes;
      row.dram_bytes = rep.traffic.total();
      row.energy_mj = rep.energy.total_mj;
    } catch (const InfeasibleError& e) {
      row.note = e.what();
    }
    sw.rows.push_back(std::move(row));
  }
  const SweepRow* ref = nullptr;
  for (const auto& r : sw.rows) {
    if (!r.feasible) continue;
    if (!ref || r.tile_size < ref->tile_size) ref = &r;
    if (!sw.best_size) {
      sw.best_size = r.tile_size;
    } else {
      const auto& best = *std::find_if(sw.rows.begin(), sw.rows.end(), [&](const SweepRow& x) {
        return x.tile_size == *sw.best_size;
      });
      if (r.tile_read_bytes < best.tile_read_bytes) sw.best_size = r.tile_size;
    }
  }
  if (ref && ref->energy_mj > 0.0) {
    const double e0 = ref->energy_mj;
    for (auto& r : sw.rows) {
      if (r.feasible) r.normalized_energy = r.energy_mj / e0;
    }
  }
  return sw;
}

FusionAblation ablate_fusion(const ExperimentConfig& cfg) {
  const NetworkSpec net = load_benchmark(cfg.network, cfg.variant);
  FusionAblation f;
  f.network = net.name;
  SimReport reps[2];
  for (int fused = 0; fused < 2; ++fused) {
    SimOptions opt = to_sim_options(cfg);
    opt.fusion = fused == 1;
    opt.all_policies = false;
    reps[fused] = run_network(net, opt);
    FusionSide& side = fused ? f.fused : f.unfused;
    side.compute_cycles = reps[fused].compute_cycles;
    side.total_cycles = reps[fused].total_cycles;
    side.intermediate_bytes = reps[fused].traffic.bytes(Traffic::kIntermediate);
    side.dram_bytes = reps[fused].traffic.total();
    side.energy_mj = reps[fused].energy.total_mj;
  }
  for (std::size_t k = 0; k < reps[0].layers.size(); ++k) {
    const auto& u = reps[0].layers[k];
    if (!u.deformable()) continue;
    f.layers.push_back({u.name, u.deformed_bytes,
                        u.traffic.bytes(Traffic::kIntermediate) -
                            reps[1].layers[k].traffic.bytes(Traffic::kIntermediate)});
  }
  return f;
}

}  // namespace dcnsim
