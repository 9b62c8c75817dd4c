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

#include "dcnsim/offsets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "dcnsim/errors.hpp"

namespace dcnsim {

OffsetField gen_offsets(const WindowGeometry& window, DcnVariant variant, std::uint64_t seed,
                        std::size_t layer, double skew) {
  if (!(skew >= 0.0) || !std::isfinite(skew)) {
    throw DomainError("offset skew must be a finite non-negative number");
  }
  if (skew == 0.0) return zero_offsets(variant, window);

  std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(layer)};
  std::mt19937_64 rng(sseq);
  const double h = static_cast<double>(window.in_height);
  const double w = static_cast<double>(window.in_width);
  std::uniform_real_distribution<double> row_at(0.0, h - 1.0);
  std::uniform_real_distribution<double> col_at(0.0, w - 1.0);
  std::array<Coord, 3> hotspots;
  for (auto& p : hotspots) p = {row_at(rng), col_at(rng)};

  const double radius = std::max(1.0, std::max(h, w) / 4.0);
  const double pull = skew / (skew + 2.0);
  const double limit = 2.0 * static_cast<double>(window.kernel) * skew;
  std::student_t_distribution<double> heavy(3.0);
  auto jitter = [&] { return std::clamp(0.5 * skew * heavy(rng), -limit, limit); };

  auto displace = [&](Coord base) {
    const Coord* near = &hotspots[0];
    double best = std::hypot(base.row - near->row, base.col - near->col);
    for (const auto& p : hotspots) {
      const double d = std::hypot(base.row - p.row, base.col - p.col);
      if (d < best) {
        best = d;
        near = &p;
      }
    }
    const double g = pull * std::exp(-(best * best) / (2.0 * radius * radius));
    const double jr = jitter();
    const double jc = jitter();
    return Coord{g * (near->row - base.row) + jr, g * (near->col - base.col) + jc};
  };

  OffsetField probe;
  probe.variant = variant;
  probe.window = window;
  std::vector<Coord> disp;
  disp.reserve(probe.expected_size());
  if (variant == DcnVariant::kPlane) {
    for (std::size_t r = 0; r < window.in_height; ++r) {
      for (std::size_t s = 0; s < window.in_width; ++s) {
        disp.push_back(displace({static_cast<double>(r), static_cast<double>(s)}));
      }
    }
  } else {
    const double pad = static_cast<double>(window.padding);
    for (std::size_t r = 0; r < window.out_height; ++r) {
      for (std::size_t s = 0; s < window.out_width; ++s) {
        for (std::size_t i = 0; i < window.kernel; ++i) {
          for (std::size_t j = 0; j < window.kernel; ++j) {
            disp.push_back(displace({static_cast<double>(r * window.stride + i) - pad,
                                     static_cast<double>(s * window.stride + j) - pad}));
          }
        }
      }
    }
  }
  return offsets_from_displacements(variant, window, disp);
}

}  // namespace dcnsim
