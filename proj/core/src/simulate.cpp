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

#include "dcnsim/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "dcnsim/errors.hpp"
#include "dcnsim/offsets.hpp"
#include "dcnsim/tiling.hpp"

namespace dcnsim {
namespace {

std::uint64_t conv_macs(const ConvLayerSpec& l, std::size_t out_h, std::size_t out_w) noexcept {
  return std::uint64_t{out_h} * out_w * l.out_channels * l.in_channels * l.kernel * l.kernel;
}

std::uint64_t weight_bytes(const ConvLayerSpec& l, std::size_t bpe) noexcept {
  return std::uint64_t{l.out_channels} * l.in_channels * l.kernel * l.kernel * bpe;
}

LayerReport base_report(const LayerSpec& l, std::size_t index) {
  LayerReport r;
  r.index = index;
  r.name = l.name;
  r.variant = l.deform;
  r.in_channels = l.in_channels;
  r.in_height = l.in_height;
  r.in_width = l.in_width;
  r.out_channels = l.out_channels;
  r.out_height = l.out_height();
  r.out_width = l.out_width();
  return r;
}

LayerReport standard_layer(const LayerSpec& l, std::size_t index, const SimOptions& opt) {
  const auto& cfg = opt.accel;
  LayerReport r = base_report(l, index);
  const ConvLayerSpec conv = l.conv();
  StageTiming st = conv_stage_cycles(conv, r.out_height, r.out_width, cfg, Stage::kConv);
  const std::uint64_t bpe = cfg.bytes_per_element;
  r.traffic.add_read(Traffic::kWeights, weight_bytes(conv, bpe));
  r.traffic.add_read(Traffic::kInputs, std::uint64_t{l.in_channels} * l.in_height * l.in_width * bpe);
  r.traffic.add_write(Traffic::kOutputs,
                      std::uint64_t{l.out_channels} * r.out_height * r.out_width * bpe);
  st.dram_cycles = cfg.transfer_cycles(r.traffic.total());
  r.stages.push_back(st);
  r.compute_cycles = st.compute_cycles;
  r.dram_cycles = st.dram_cycles;
  r.total_cycles = std::max(st.compute_cycles, st.dram_cycles);
  r.stall_cycles = r.total_cycles - r.compute_cycles;
  return r;
}

LayerReport deformable_layer(const LayerSpec& l, std::size_t index, const SimOptions& opt) {
  const auto& cfg = opt.accel;
  const std::uint64_t bpe = cfg.bytes_per_element;
  LayerReport r = base_report(l, index);
  const ConvLayerSpec main = l.conv();
  const ConvLayerSpec off = l.offset_conv();
  const DcnVariant variant = *l.deform;
  const std::size_t k2 = l.kernel * l.kernel;

  // Stage 1: offset conv over the whole input map; coordinates go to the index buffer.
  const std::size_t off_h = variant == DcnVariant::kPlane ? l.in_height : r.out_height;
  const std::size_t off_w = variant == DcnVariant::kPlane ? l.in_width : r.out_width;
  StageTiming conv1 = conv_stage_cycles(conv_macs(off, off_h, off_w), cfg, Stage::kOffsetConv);
  const std::uint64_t input_bytes = std::uint64_t{l.in_channels} * l.in_height * l.in_width * bpe;

  const OffsetField offs = layer_offsets(l, index, opt);
  const auto grids = layer_grids(l, opt);
  const TileDependencyTable tdt = build_tdt(offs, grids.in, grids.out);
  const auto per_tile = deformed_per_tile(offs, grids.out);

  std::vector<std::uint64_t> tile_bytes(grids.in.count());
  for (std::size_t t = 0; t < grids.in.count(); ++t) {
    tile_bytes[t] = grids.in.rect(t).area() * l.in_channels * bpe;
  }
  r.largest_tile_bytes = *std::max_element(tile_bytes.begin(), tile_bytes.end());
  r.grid_rows = grids.in.rows;
  r.grid_cols = grids.in.cols;
  r.tiles_in = grids.in.count();
  r.tiles_out = grids.out.count();
  r.max_row_tiles = tdt.max_row_count();
  r.capacity = opt.capacity.resolve(r.tiles_in, r.largest_tile_bytes);
  r.deformed_samples = offs.deformed_count();
  r.deformed_bytes = r.deformed_samples * l.in_channels * bpe;
  r.access_cv = access_histogram(offs, grids.in).tile_cv();

  ScheduleOptions so;
  so.oversize = opt.capacity.oversize();
  FeatureDependencies features;
  auto run = [&](SchedulePolicy p) {
    if (p == SchedulePolicy::kNaive && features.empty()) {
      features = build_feature_dependencies(offs, grids.in, grids.out);
      so.features = &features;
    }
    return run_schedule(tdt, r.capacity, p, so);
  };
  const ScheduleResult sched = run(opt.policy);
  if (opt.all_policies) {
    PolicyLoads pl;
    for (auto p : {SchedulePolicy::kNaive, SchedulePolicy::kTdtOnly, SchedulePolicy::kTdtSched}) {
      const std::size_t loads = p == opt.policy ? sched.loads : run(p).loads;
      (p == SchedulePolicy::kNaive ? pl.naive
       : p == SchedulePolicy::kTdtOnly ? pl.tdt_only : pl.tdt_sched) = loads;
    }
    r.policy_loads = pl;
  }
  r.loads = sched.loads;
  r.evictions = sched.evictions;
  r.streamed_steps = sched.streamed_steps;

  const std::uint64_t coord_bytes = offs.coords.size() * 2 * cfg.index_bytes;
  LayerIo io;
  io.weight_bytes = weight_bytes(main, bpe) + weight_bytes(off, bpe);
  io.input_bytes = input_bytes;
  io.output_bytes = std::uint64_t{l.out_channels} * r.out_height * r.out_width * bpe;
  io.intermediate_bytes = r.deformed_bytes;
  io.index_spill_bytes = coord_bytes > cfg.index_buf ? coord_bytes : 0;
  r.traffic = tally_traffic(sched, tile_bytes, io, opt.fusion);
  r.tile_read_bytes = r.traffic.read(Traffic::kInputs) - input_bytes;

  conv1.dram_cycles = cfg.transfer_cycles(input_bytes + io.weight_bytes + 2 * io.index_spill_bytes);
  std::uint64_t total = std::max(conv1.compute_cycles, conv1.dram_cycles);

  // Stages 2-3, output tile by output tile in schedule order; tiles without
  // samples still run their conv.
  std::vector<std::size_t> order = sched.oid;
  std::vector<std::vector<std::size_t>> loads_of(grids.out.count());
  for (std::size_t k = 0; k < sched.trace.size(); ++k) loads_of[sched.trace[k].output_tile] = sched.trace[k].loads;
  {
    std::vector<bool> seen(grids.out.count(), false);
    for (auto t : order) seen[t] = true;
    for (std::size_t t = 0; t < grids.out.count(); ++t) {
      if (!seen[t]) order.push_back(t);
    }
  }
  StageTiming bli{Stage::kBli};
  StageTiming conv2{Stage::kMainConv};
  for (std::size_t t : order) {
    const TileRect rc = grids.out.rect(t);
    const StageTiming b = bli_stage_cycles(per_tile[t], l.in_channels, cfg);
    const StageTiming c =
        conv_stage_cycles(std::uint64_t{rc.area()} * l.out_channels * l.in_channels * k2, cfg,
                          Stage::kMainConv);
    std::uint64_t in_b = 0;
    for (auto s : loads_of[t]) in_b += tile_bytes[s];
    const std::uint64_t out_b = std::uint64_t{rc.area()} * l.out_channels * bpe;
    const std::uint64_t xd_b = std::uint64_t{per_tile[t]} * l.in_channels * bpe;
    bli.compute_cycles += b.compute_cycles;
    bli.buffer_read_cycles += b.buffer_read_cycles;
    conv2.compute_cycles += c.compute_cycles;
    if (opt.fusion) {
      const std::uint64_t d = cfg.transfer_cycles(in_b + out_b);
      bli.dram_cycles += cfg.transfer_cycles(in_b);
      conv2.dram_cycles += d - cfg.transfer_cycles(in_b);
      total += std::max(b.compute_cycles + c.compute_cycles, d);
    } else {
      const std::uint64_t d1 = cfg.transfer_cycles(in_b + xd_b);
      const std::uint64_t d2 = cfg.transfer_cycles(xd_b + out_b);
      bli.dram_cycles += d1;
      conv2.dram_cycles += d2;
      total += std::max(b.compute_cycles, d1) + std::max(c.compute_cycles, d2);
    }
  }
  r.stages = {conv1, bli, conv2};
  for (const auto& s : r.stages) {
    r.compute_cycles += s.compute_cycles;
    r.dram_cycles += s.dram_cycles;
  }
  r.total_cycles = total;
  r.stall_cycles = total - r.compute_cycles;
  if (opt.keep_artifacts) {
    r.trace_text = format_trace(sched);
    r.tdt_bitmap = tdt.to_bitmap();
  }
  return r;
}

}  // namespace

std::size_t CapacityRule::resolve(std::size_t n_in, std::uint64_t largest_tile_bytes) const {
  std::size_t m = 0;
  switch (kind) {
    case Kind::kTiles:
      m = tiles;
      break;
    case Kind::kFraction:
      if (!(fraction > 0.0)) throw ConfigError("buffer fraction must be positive");
      m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n_in) - 1e-9));
      break;
    case Kind::kBytes:
      m = largest_tile_bytes ? static_cast<std::size_t>(bytes / largest_tile_bytes) : n_in;
      break;
  }
  if (m == 0) {
    throw InfeasibleError("buffer holds no input tile (largest tile " +
                              std::to_string(largest_tile_bytes) + " B)",
                          0);
  }
  return std::min(m, n_in);
}

std::size_t PolicyLoads::of(SchedulePolicy p) const noexcept {
  switch (p) {
    case SchedulePolicy::kNaive:
      return naive;
    case SchedulePolicy::kTdtOnly:
      return tdt_only;
    case SchedulePolicy::kTdtSched:
      return tdt_sched;
  }
  return 0;
}

PolicyLoads& PolicyLoads::operator+=(const PolicyLoads& o) noexcept {
  naive += o.naive;
  tdt_only += o.tdt_only;
  tdt_sched += o.tdt_sched;
  return *this;
}

LayerGrids layer_grids(const LayerSpec& layer, const SimOptions& opt) {
  const std::size_t h = layer.in_height;
  const std::size_t w = layer.in_width;
  LayerGrids g;
  if (opt.tile_size) {
    g.in = grid_for_tile_size(h, w, opt.tile_size, opt.tile_size);
  } else {
    g.in = build_tile_grid(h, w, std::min(opt.tile_rows, h), std::min(opt.tile_cols, w));
  }
  const std::size_t oh = layer.out_height();
  const std::size_t ow = layer.out_width();
  g.out = build_tile_grid(oh, ow, std::min(g.in.rows, oh), std::min(g.in.cols, ow));
  return g;
}

OffsetField layer_offsets(const LayerSpec& layer, std::size_t index, const SimOptions& opt) {
  return gen_offsets(layer.window(), layer.deform.value_or(DcnVariant::kWindow), opt.seed, index,
                     opt.skew);
}

SimReport run_network(const NetworkSpec& net, const SimOptions& opt) {
  net.validate();
  opt.accel.validate();
  SimReport rep;
  rep.network = net.name;
  rep.options = opt;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const LayerSpec& l = net.layers[k];
    LayerReport lr = l.deformable() ? deformable_layer(l, k, opt) : standard_layer(l, k, opt);
    rep.compute_cycles += lr.compute_cycles;
    rep.total_cycles += lr.total_cycles;
    rep.tile_read_bytes += lr.tile_read_bytes;
    rep.loads += lr.loads;
    if (lr.policy_loads) {
      if (!rep.policy_loads) rep.policy_loads = PolicyLoads{};
      *rep.policy_loads += *lr.policy_loads;
    }
    rep.traffic += lr.traffic;
    rep.layers.push_back(std::move(lr));
  }
  rep.runtime_s = static_cast<double>(rep.total_cycles) / opt.accel.clock_hz;
  DramConfig dram = opt.dram;
  dram.bandwidth = opt.accel.dram_bandwidth;
  for (auto& lr : rep.layers) {
    lr.traffic.finalize(dram, static_cast<double>(lr.total_cycles) / opt.accel.clock_hz);
  }
  rep.traffic.finalize(dram, rep.runtime_s);
  rep.energy = estimate_energy(rep.traffic, opt.power, rep.runtime_s);
  return rep;
}

}  // namespace dcnsim
