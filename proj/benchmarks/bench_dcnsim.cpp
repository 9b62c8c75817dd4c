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

// Micro-benchmarks for the hot paths: functional deformable conv, TDT
// construction and the three scheduling policies.

#include <benchmark/benchmark.h>

#include <random>

#include "dcnsim/deform.hpp"
#include "dcnsim/offsets.hpp"
#include "dcnsim/scheduler.hpp"
#include "dcnsim/tiling.hpp"

using namespace dcnsim;

namespace {

Tensor3D random_tensor(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor3D t(c, h, w);
  for (auto& v : t.data) v = u(rng);
  return t;
}

ConvLayerSpec random_layer(std::size_t in, std::size_t out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ConvLayerSpec l = ConvLayerSpec::zeros(in, out, 3, 1, 1);
  for (auto& v : l.weights) v = u(rng);
  for (auto& v : l.bias) v = u(rng);
  return l;
}

void BM_DeformableConv(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto hw = static_cast<std::size_t>(state.range(1));
  const Tensor3D x = random_tensor(c, hw, hw, 1);
  const ConvLayerSpec main = random_layer(c, c, 2);
  const OffsetField offs = gen_offsets(WindowGeometry::of(main, hw, hw), DcnVariant::kWindow, 3, 0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(deformable_conv(x, offs, main));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * offs.coords.size() * c));
}
BENCHMARK(BM_DeformableConv)->Args({8, 16})->Args({8, 32})->Args({16, 32});

void BM_BuildTdt(benchmark::State& state) {
  const auto hw = static_cast<std::size_t>(state.range(0));
  const auto win = WindowGeometry::make(hw, hw, 3, 1, 1);
  const OffsetField offs = gen_offsets(win, DcnVariant::kWindow, 5, 0, 2.0);
  const TileGrid g = build_tile_grid(hw, hw, 5, 5);
  for (auto _ : state) benchmark::DoNotOptimize(build_tdt(offs, g, g));
}
BENCHMARK(BM_BuildTdt)->Arg(28)->Arg(56)->Arg(112);

void BM_RunSchedule(benchmark::State& state) {
  const auto policy = static_cast<SchedulePolicy>(state.range(0));
  const auto win = WindowGeometry::make(56, 56, 3, 1, 1);
  const OffsetField offs = gen_offsets(win, DcnVariant::kWindow, 7, 0, 2.0);
  const TileGrid g = build_tile_grid(56, 56, 8, 8);
  const auto tdt = build_tdt(offs, g, g);
  const auto features = build_feature_dependencies(offs, g, g);
  ScheduleOptions opt;
  opt.features = &features;
  opt.oversize = OversizeMode::kStream;
  for (auto _ : state) benchmark::DoNotOptimize(run_schedule(tdt, 16, policy, opt));
  state.SetLabel(std::string(to_string(policy)));
}
BENCHMARK(BM_RunSchedule)->DenseRange(0, 2);

}  // namespace
BENCHMARK_MAIN();
