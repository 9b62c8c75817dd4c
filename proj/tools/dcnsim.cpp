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

// dcnsim: command-line driver for the deformable convolution accelerator model.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dcnsim/config.hpp"
#include "dcnsim/errors.hpp"
#include "dcnsim/experiment.hpp"
#include "dcnsim/network.hpp"
#include "dcnsim/report.hpp"

namespace fs = std::filesystem;
using namespace dcnsim;

namespace {

// Flags that override the config file; unset flags leave it alone.
struct Overrides {
  std::string config_path;
  std::optional<std::string> network, variant, policy;
  std::optional<std::size_t> tile_rows, tile_cols, tile_size, buffer_tiles;
  std::optional<double> buffer_fraction, skew;
  std::optional<std::uint64_t> buffer_bytes, seed;
  std::optional<bool> fusion;
  std::string out_dir = "dcnsim-out";

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "TOML-style experiment config")->check(CLI::ExistingFile);
    app->add_option("-n,--network", network, "benchmark name (see list-benchmarks)");
    app->add_option("--variant", variant, "DCN-I or DCN-II");
    app->add_option("--policy", policy, "naive, tdt_only or tdt_sched");
    app->add_option("--tile-rows", tile_rows);
    app->add_option("--tile-cols", tile_cols);
    app->add_option("--tile-size", tile_size, "square input tiles instead of a grid");
    app->add_option("--buffer-tiles", buffer_tiles, "strict capacity in tiles");
    app->add_option("--buffer-fraction", buffer_fraction, "capacity as a fraction of input tiles");
    app->add_option("--buffer-bytes", buffer_bytes, "capacity as a byte budget");
    app->add_option("--seed", seed);
    app->add_option("--skew", skew, "synthetic offset skew, 0 = no deformation");
    app->add_option("--fusion", fusion, "fuse BLI with the main conv (true/false)");
    app->add_option("-o,--out", out_dir, "output directory");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else {
      apply_env_overrides(cfg);
    }
    if (network) cfg.network = *network;
    if (variant) cfg.variant = parse_variant(*variant);
    if (policy) cfg.policy = parse_policy(*policy);
    if (tile_rows) cfg.tile_rows = *tile_rows;
    if (tile_cols) cfg.tile_cols = *tile_cols;
    if (tile_size) cfg.tile_size = *tile_size;
    if (buffer_tiles) cfg.buffer_tiles = *buffer_tiles;
    if (buffer_fraction) cfg.buffer_fraction = *buffer_fraction;
    if (buffer_bytes) cfg.buffer_bytes = *buffer_bytes;
    if (seed) cfg.seed = *seed;
    if (skew) cfg.skew = *skew;
    if (fusion) cfg.fusion = *fusion;
    // Round-trip through the parser so flag values get the same validation as files.
    return parse_config(serialize_config(cfg));
  }
};

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
}

int cmd_run(const Overrides& o) {
  const ExperimentConfig cfg = o.resolve();
  const SimReport rep = run_experiment(cfg, o.out_dir);
  std::cout << rep.network << ": " << rep.total_cycles << " cycles, " << rep.traffic.total()
            << " DRAM bytes, " << rep.energy.total_mj << " mJ DRAM energy\n"
            << "report: " << (fs::path(o.out_dir) / "report.json").string() << '\n';
  return 0;
}

int cmd_ablate_scheduler(const Overrides& o) {
  const auto a = ablate_scheduler(o.resolve());
  write_text(fs::path(o.out_dir) / "ablate-scheduler.json", ablation_json(a, utc_timestamp()));
  std::cout << a.network << " tile loads:";
  for (const auto& r : a.rows) std::cout << ' ' << to_string(r.policy) << '=' << r.loads;
  std::cout << "\ntdt_sched vs tdt_only: " << a.reduction_vs_tdt_only_pct
            << "% fewer loads (reference figure " << SchedulerAblation::kReferenceReductionPct << "%)\n";
  return 0;
}

int cmd_sweep(const Overrides& o, const std::vector<std::size_t>& sizes_in) {
  const ExperimentConfig cfg = o.resolve();
  const auto sizes = sizes_in.empty() ? default_tile_sizes(load_benchmark(cfg.network, cfg.variant))
                                      : sizes_in;
  const auto s = sweep_tile_size(cfg, sizes);
  write_text(fs::path(o.out_dir) / "sweep-tile-size.json", sweep_json(s, utc_timestamp()));
  std::cout << s.network << " (budget " << s.budget_bytes << " B)\n";
  for (const auto& r : s.rows) {
    std::cout << "  tile " << r.tile_size << ": ";
    if (r.feasible) {
      std::cout << r.tile_read_bytes << " feature bytes, " << r.energy_mj << " mJ\n";
    } else {
      std::cout << "infeasible (" << r.note << ")\n";
    }
  }
  return 0;
}

int cmd_fusion(const Overrides& o) {
  const auto f = ablate_fusion(o.resolve());
  write_text(fs::path(o.out_dir) / "ablate-fusion.json", fusion_json(f, utc_timestamp()));
  std::cout << f.network << " intermediate bytes: fused=" << f.fused.intermediate_bytes
            << " unfused=" << f.unfused.intermediate_bytes << "; cycles fused=" << f.fused.total_cycles
            << " unfused=" << f.unfused.total_cycles << '\n';
  return 0;
}

int cmd_energy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ledger " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const LedgerFile lf = parse_ledger_json(ss.str(), DramConfig{});
  std::cout << energy_json(estimate_energy(lf.ledger, DramPowerModel{}, lf.runtime_s));
  return 0;
}

int cmd_list() {
  for (const auto& name : list_benchmarks()) {
    const NetworkSpec n = load_benchmark(name);
    std::cout << name << "  layers=" << n.layers.size() << " deformable=" << n.deformable_count()
              << " input=" << n.in_channels << 'x' << n.in_height << 'x' << n.in_width << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deformable convolution accelerator simulator"};
  app.require_subcommand(1);

  Overrides run_o, abl_o, sweep_o, fus_o;
  auto* run = app.add_subcommand("run", "simulate one configuration and write report, traces and TDTs");
  run_o.attach(run);
  auto* abl = app.add_subcommand("ablate-scheduler", "compare naive, tdt_only and tdt_sched");
  abl_o.attach(abl);
  auto* sweep = app.add_subcommand("sweep-tile-size", "DRAM traffic and energy per tile size");
  sweep_o.attach(sweep);
  std::vector<std::size_t> sizes;
  sweep->add_option("--sizes", sizes, "tile edges to sweep (default 2, 4, ... full map)");
  auto* fus = app.add_subcommand("ablate-fusion", "fused vs unfused BLI and main conv");
  fus_o.attach(fus);
  auto* energy = app.add_subcommand("energy", "DRAM energy of a traffic ledger file");
  std::string ledger;
  energy->add_option("ledger", ledger, "ledger JSON")->required()->check(CLI::ExistingFile);
  auto* list = app.add_subcommand("list-benchmarks", "print the available networks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_o);
    if (*abl) return cmd_ablate_scheduler(abl_o);
    if (*sweep) return cmd_sweep(sweep_o, sizes);
    if (*fus) return cmd_fusion(fus_o);
    if (*energy) return cmd_energy(ledger);
    if (*list) return cmd_list();
  } catch (const InfeasibleError& e) {
    std::cerr << "dcnsim: infeasible: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "dcnsim: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dcnsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
