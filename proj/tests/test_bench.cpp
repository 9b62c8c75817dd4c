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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dcnsim/config.hpp"
#include "dcnsim/errors.hpp"
#include "dcnsim/experiment.hpp"
#include "dcnsim/network.hpp"
#include "dcnsim/offsets.hpp"
#include "dcnsim/report.hpp"
#include "dcnsim/simulate.hpp"
#include "json.hpp"

using namespace dcnsim;

namespace {

NetworkSpec toy() {
  NetworkSpec n;
  n.name = "toy";
  n.in_channels = 2;
  n.in_height = 8;
  n.in_width = 8;
  LayerSpec a;
  a.name = "a";
  a.in_channels = 2;
  a.out_channels = 3;
  a.in_height = a.in_width = 8;
  LayerSpec b = a;
  b.name = "b";
  b.in_channels = 3;
  b.out_channels = 2;
  b.deform = DcnVariant::kWindow;
  n.layers = {a, b};
  return n;
}

}  // namespace

TEST_CASE("benchmark tables") {
  const auto v3 = load_benchmark("VGG19-3");
  CHECK(v3.layers.size() == 16);
  CHECK(v3.deformable_count() == 3);
  CHECK(v3.layers.back().deformable());
  CHECK(!v3.layers[12].deformable());
  const auto vf = load_benchmark("VGG19-F");
  CHECK(vf.layers.size() == 19);
  CHECK(vf.deformable_count() == 19);
  CHECK(load_benchmark("SegNet-8").deformable_count() == 8);
  CHECK(load_benchmark("segnet-f").layers.back().out_channels == 12);
  const auto tiny = load_benchmark("tiny-VGG-3");
  CHECK(tiny.name == "tiny-VGG19-3");
  CHECK(tiny.layers.size() == v3.layers.size());
  CHECK(tiny.deformable_count() == 3);
  for (std::size_t k = 0; k < tiny.layers.size(); ++k) {
    CHECK(tiny.layers[k].out_channels * 8 == v3.layers[k].out_channels);
  }
  CHECK(tiny.in_height == 56);
  CHECK(load_benchmark("tiny-SegNet-3").in_width == 120);
  CHECK(list_benchmarks().size() == 12);
  for (const auto& name : list_benchmarks()) CHECK(load_benchmark(name).name == name);
  CHECK_THROWS_AS(load_benchmark("ResNet-3"), ConfigError);
  CHECK_THROWS_AS(load_benchmark("VGG19-4"), ConfigError);
}

TEST_CASE("plane variant offset branch preserves the map") {
  const auto net = load_benchmark("tiny-VGG19-3", DcnVariant::kPlane);
  const auto& l = net.layers.back();
  CHECK(l.offset_conv().out_channels == 2);
  CHECK(l.offset_conv().padding == 1);
  CHECK(load_benchmark("tiny-VGG19-3").layers.back().offset_conv().out_channels == 18);
}

TEST_CASE("broken chaining is reported") {
  NetworkSpec n = toy();
  n.layers[1].in_channels = 5;
  CHECK_THROWS_AS(n.validate(), ConfigError);
  n = toy();
  n.layers[1].in_height = 4;
  CHECK_THROWS_AS(n.validate(), ConfigError);
}

TEST_CASE("synthetic offsets") {
  const auto win = WindowGeometry::make(20, 20, 3, 1, 1);
  for (DcnVariant v : {DcnVariant::kPlane, DcnVariant::kWindow}) {
    const OffsetField z = gen_offsets(win, v, 9, 0, 0.0);
    const OffsetField ref = zero_offsets(v, win);
    CHECK(z.coords == ref.coords);
    const OffsetField a = gen_offsets(win, v, 9, 2, 2.0);
    CHECK(a.coords == gen_offsets(win, v, 9, 2, 2.0).coords);
    CHECK(a.coords != gen_offsets(win, v, 10, 2, 2.0).coords);
    CHECK(a.coords != gen_offsets(win, v, 9, 3, 2.0).coords);
    CHECK_NOTHROW(a.validate());
    const TileGrid g = build_tile_grid(20, 20, 5, 5);
    CHECK(access_histogram(a, g).tile_cv() > access_histogram(z, g).tile_cv());
  }
  CHECK_THROWS_AS(gen_offsets(win, DcnVariant::kWindow, 1, 0, -1.0), DomainError);
  CHECK_THROWS_AS(gen_offsets(win, DcnVariant::kWindow, 1, 0, INFINITY), DomainError);
}

TEST_CASE("config round-trip and validation") {
  ExperimentConfig c;
  c.network = "tiny-SegNet-8";
  c.variant = DcnVariant::kPlane;
  c.tile_rows = 4;
  c.buffer_fraction = 0.3;
  c.policy = SchedulePolicy::kNaive;
  c.fusion = false;
  c.seed = 77;
  c.skew = 1.25;
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(parse_config(serialize_config(ExperimentConfig{})) == ExperimentConfig{});
  const auto p = parse_config("# comment\nnetwork = \"VGG19-3\"  # trailing\nseed=5\n\nskew = 0\n");
  CHECK(p.network == "VGG19-3");
  CHECK(p.seed == 5);
  CHECK(p.skew == 0.0);
  CHECK_THROWS_AS(parse_config("colour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("policy = best\n"), ConfigError);
}

TEST_CASE("capacity rules") {
  CHECK(CapacityRule::of_tiles(3).resolve(25, 100) == 3);
  CHECK(CapacityRule::of_fraction(0.25).resolve(25, 100) == 7);
  CHECK(CapacityRule::of_bytes(1000).resolve(25, 300) == 3);
  CHECK(CapacityRule::of_bytes(100000).resolve(25, 300) == 25);
  CHECK_THROWS_AS(CapacityRule::of_bytes(100).resolve(25, 300), InfeasibleError);
  CHECK(CapacityRule::of_tiles(3).oversize() == OversizeMode::kError);
  CHECK(CapacityRule::of_fraction(0.5).oversize() == OversizeMode::kStream);
}

TEST_CASE("single standard layer costs its conv and traffic") {
  NetworkSpec n = toy();
  n.layers.pop_back();
  SimOptions opt;
  const SimReport r = run_network(n, opt);
  const auto st = conv_stage_cycles(n.layers[0].conv(), 8, 8, opt.accel);
  const std::uint64_t bytes = 3 * 2 * 9 + 2 * 64 + 3 * 64;
  CHECK(r.traffic.total() == bytes);
  CHECK(r.compute_cycles == st.compute_cycles);
  CHECK(r.total_cycles == std::max(st.compute_cycles, opt.accel.transfer_cycles(bytes)));
  CHECK(!r.policy_loads);
}

TEST_CASE("two-layer toy network equals per-stage recomputation") {
  const NetworkSpec n = toy();
  SimOptions opt;
  opt.seed = 11;
  opt.tile_rows = opt.tile_cols = 3;
  opt.capacity = CapacityRule::of_tiles(9);
  const SimReport r = run_network(n, opt);
  REQUIRE(r.layers.size() == 2);
  const auto& cfg = opt.accel;

  const auto& l = n.layers[1];
  const auto offs = gen_offsets(l.window(), DcnVariant::kWindow, 11, 1, opt.skew);
  const TileGrid g = build_tile_grid(8, 8, 3, 3);
  const auto tdt = build_tdt(offs, g, g);
  const auto sched = run_schedule(tdt, 9, SchedulePolicy::kTdtSched);
  const std::uint64_t w_main = 2 * 3 * 9, w_off = 18 * 3 * 9, in = 3 * 64;
  const std::uint64_t conv1_compute = (64ull * 18 * 3 * 9 + 511) / 512 + 48;
  std::uint64_t total = std::max(conv1_compute, cfg.transfer_cycles(in + w_main + w_off));
  std::uint64_t compute = conv1_compute, tile_bytes = 0;
  for (const auto& step : sched.trace) {
    const TileRect rc = g.rect(step.output_tile);
    std::uint64_t in_b = 0;
    for (auto t : step.loads) in_b += g.rect(t).area() * 3;
    tile_bytes += in_b;
    const std::uint64_t bli = (rc.area() * 9 * 3 + 127) / 128 + 4;
    const std::uint64_t conv2 = (rc.area() * 2 * 3 * 9 + 511) / 512 + 48;
    compute += bli + conv2;
    total += std::max(bli + conv2, cfg.transfer_cycles(in_b + rc.area() * 2));
  }
  CHECK(r.layers[1].loads == sched.loads);
  CHECK(r.layers[1].tile_read_bytes == tile_bytes);
  CHECK(r.layers[1].compute_cycles == compute);
  CHECK(r.layers[1].total_cycles == total);
  CHECK(r.total_cycles == r.layers[0].total_cycles + r.layers[1].total_cycles);
  CHECK(r.compute_cycles == r.layers[0].compute_cycles + r.layers[1].compute_cycles);
  std::uint64_t stage_sum = 0;
  for (const auto& s : r.layers[1].stages) stage_sum += s.compute_cycles;
  CHECK(stage_sum == r.layers[1].compute_cycles);
  CHECK(r.traffic.total() == r.layers[0].traffic.total() + r.layers[1].traffic.total());
}

TEST_CASE("fusion changes traffic, not compute") {
  SimOptions on;
  on.capacity = CapacityRule::of_fraction(0.5);
  SimOptions off = on;
  off.fusion = false;
  const auto net = load_benchmark("tiny-VGG19-3");
  const SimReport a = run_network(net, on), b = run_network(net, off);
  CHECK(a.compute_cycles == b.compute_cycles);
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    const auto& fa = a.layers[k].traffic;
    const auto& fb = b.layers[k].traffic;
    CHECK(fa.bytes(Traffic::kIntermediate) == 0);
    CHECK(fb.bytes(Traffic::kIntermediate) == 2 * b.layers[k].deformed_bytes);
  }
  CHECK(b.total_cycles >= a.total_cycles);
}

TEST_CASE("unbounded buffer: every policy loads the same") {
  ExperimentConfig c;
  c.network = "tiny-VGG19-3";
  c.buffer_fraction = 1.0;
  const auto a = ablate_scheduler(c);
  CHECK(a.row(SchedulePolicy::kNaive).loads == a.row(SchedulePolicy::kTdtSched).loads);
  CHECK(a.row(SchedulePolicy::kTdtOnly).loads == a.row(SchedulePolicy::kTdtSched).loads);
}

TEST_CASE("strict capacity that cannot hold a row is infeasible") {
  ExperimentConfig c;
  c.network = "tiny-VGG19-3";
  c.buffer_tiles = 1;
  CHECK_THROWS_AS(simulate(c), InfeasibleError);
}

TEST_CASE("default sweep sizes") {
  const auto net = load_benchmark("tiny-VGG19-F");
  CHECK(full_map_extent(net) == 56);
  CHECK(default_tile_sizes(net) == std::vector<std::size_t>{2, 4, 8, 16, 32, 56});
}

TEST_CASE("run_experiment writes report, traces and tables") {
  const auto dir = std::filesystem::temp_directory_path() / "dcnsim_test_run";
  std::filesystem::remove_all(dir);
  ExperimentConfig c;
  c.network = "tiny-SegNet-3";
  const SimReport r = run_experiment(c, dir);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(parse_config([&] {
          std::ifstream in(dir / "config.toml");
          std::stringstream ss;
          ss << in.rdbuf();
          return ss.str();
        }()) == c);
  std::size_t traces = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "traces")) {
    (void)e;
    ++traces;
  }
  CHECK(traces == 3);
  std::ifstream in(dir / "report.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["network"] == "tiny-SegNet-3");
  CHECK(j["layers"].size() == r.layers.size());
  CHECK(j["energy"]["core"] == "not modeled");
  std::filesystem::remove_all(dir);
}

TEST_CASE("environment seed override") {
  ExperimentConfig c;
  ::setenv("DCNSIM_SEED", "123", 1);
  apply_env_overrides(c);
  ::unsetenv("DCNSIM_SEED");
  CHECK(c.seed == 123);
}

TEST_CASE("ledger files") {
  TrafficLedger l;
  l.add_read(Traffic::kInputs, 8192);
  l.add_write(Traffic::kOutputs, 4096);
  const LedgerFile f = parse_ledger_json(ledger_json(l, 0.5), DramConfig{});
  CHECK(f.runtime_s == 0.5);
  CHECK(f.ledger.read(Traffic::kInputs) == 8192);
  CHECK(f.ledger.activations == 6);
  const LedgerFile o = parse_ledger_json(
      R"({"read_bytes": {}, "write_bytes": {}, "runtime_s": 1.0, "active_read_s": 1.0})", DramConfig{});
  CHECK(estimate_energy(o.ledger, DramPowerModel{}, o.runtime_s).total_mj ==
        doctest::Approx(84.8 + 67.7).epsilon(1e-12));
  CHECK_THROWS_AS(parse_ledger_json("{", DramConfig{}), ConfigError);
  CHECK_THROWS_AS(parse_ledger_json(R"({"read_bytes": {"bogus": 1}, "runtime_s": 1})", DramConfig{}), ConfigError);
}
