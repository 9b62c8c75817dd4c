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

#include "dcnsim/deform.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "dcnsim/errors.hpp"

namespace dcnsim {

std::string_view to_string(DcnVariant v) noexcept {
  return v == DcnVariant::kPlane ? "DCN-I" : "DCN-II";
}

DcnVariant parse_variant(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  if (s == "DCN-I" || s == "I" || s == "1" || s == "DCN1") return DcnVariant::kPlane;
  if (s == "DCN-II" || s == "II" || s == "2" || s == "DCN2") return DcnVariant::kWindow;
  throw ConfigError("unknown DCN variant '" + std::string(name) + "'");
}

std::size_t offset_channels(DcnVariant v, std::size_t kernel) noexcept {
  return v == DcnVariant::kPlane ? 2 : 2 * kernel * kernel;
}

Coord clamp_coord(Coord c, std::size_t height, std::size_t width) noexcept {
  const double max_row = static_cast<double>(height) - 1.0;
  const double max_col = static_cast<double>(width) - 1.0;
  // NaN maps to 0 so a broken offset branch cannot escape the plane.
  c.row = std::isnan(c.row) ? 0.0 : std::clamp(c.row, 0.0, max_row);
  c.col = std::isnan(c.col) ? 0.0 : std::clamp(c.col, 0.0, max_col);
  return c;
}

std::size_t OffsetField::field_height() const noexcept {
  return variant == DcnVariant::kPlane ? window.in_height : window.out_height;
}

std::size_t OffsetField::field_width() const noexcept {
  return variant == DcnVariant::kPlane ? window.in_width : window.out_width;
}

std::size_t OffsetField::samples_per_position() const noexcept {
  return variant == DcnVariant::kPlane ? 1 : window.taps();
}

std::size_t OffsetField::expected_size() const noexcept {
  return field_height() * field_width() * samples_per_position();
}

void OffsetField::validate() const {
  if (coords.size() != expected_size()) {
    throw ConfigError("offset field has " + std::to_string(coords.size()) +
                      " coordinates, expected " + std::to_string(expected_size()));
  }
  const double max_row = static_cast<double>(window.in_height) - 1.0;
  const double max_col = static_cast<double>(window.in_width) - 1.0;
  for (const Coord& c : coords) {
    if (!(c.row >= 0.0 && c.row <= max_row && c.col >= 0.0 && c.col <= max_col)) {
      throw ConfigError("offset field coordinate (" + std::to_string(c.row) + ", " +
                        std::to_string(c.col) + ") outside the clamped plane");
    }
  }
}

std::optional<Coord> OffsetField::sample(std::size_t r, std::size_t s, std::size_t i,
                                         std::size_t j) const noexcept {
  if (variant == DcnVariant::kWindow) {
    const std::size_t k = window.kernel;
    return coords[((r * window.out_width + s) * k + i) * k + j];
  }
  const auto row = static_cast<std::ptrdiff_t>(r * window.stride + i) -
                   static_cast<std::ptrdiff_t>(window.padding);
  const auto col = static_cast<std::ptrdiff_t>(s * window.stride + j) -
                   static_cast<std::ptrdiff_t>(window.padding);
  if (row < 0 || col < 0 || row >= static_cast<std::ptrdiff_t>(window.in_height) ||
      col >= static_cast<std::ptrdiff_t>(window.in_width)) {
    return std::nullopt;
  }
  return coords[static_cast<std::size_t>(row) * window.in_width + static_cast<std::size_t>(col)];
}

OffsetField offsets_from_displacements(DcnVariant variant, const WindowGeometry& window,
                                       std::span<const Coord> displacements) {
  OffsetField offs;
  offs.variant = variant;
  offs.window = window;
  if (displacements.size() != offs.expected_size()) {
    throw ConfigError("displacement count " + std::to_string(displacements.size()) +
                      " != expected " + std::to_string(offs.expected_size()));
  }
  offs.coords.resize(displacements.size());
  const double pad = static_cast<double>(window.padding);
  if (variant == DcnVariant::kPlane) {
    for (std::size_t r = 0; r < window.in_height; ++r) {
      for (std::size_t s = 0; s < window.in_width; ++s) {
        const std::size_t idx = r * window.in_width + s;
        const Coord base{static_cast<double>(r), static_cast<double>(s)};
        offs.coords[idx] = clamp_coord({base.row + displacements[idx].row,
                                        base.col + displacements[idx].col},
                                       window.in_height, window.in_width);
      }
    }
    return offs;
  }
  const std::size_t k = window.kernel;
  for (std::size_t r = 0; r < window.out_height; ++r) {
    for (std::size_t s = 0; s < window.out_width; ++s) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const std::size_t idx = ((r * window.out_width + s) * k + i) * k + j;
          const double base_row = static_cast<double>(r * window.stride + i) - pad;
          const double base_col = static_cast<double>(s * window.stride + j) - pad;
          offs.coords[idx] = clamp_coord({base_row + displacements[idx].row,
                                          base_col + displacements[idx].col},
                                         window.in_height, window.in_width);
        }
      }
    }
  }
  return offs;
}

OffsetField zero_offsets(DcnVariant variant, const WindowGeometry& window) {
  OffsetField probe;
  probe.variant = variant;
  probe.window = window;
  std::vector<Coord> zeros(probe.expected_size());
  return offsets_from_displacements(variant, window, zeros);
}

OffsetField compute_offsets(const Tensor3D& x, const ConvLayerSpec& offset_layer,
                            const ConvLayerSpec& main_layer, DcnVariant variant) {
  main_layer.validate();
  if (offset_layer.out_channels != offset_channels(variant, main_layer.kernel)) {
    throw ConfigError("offset layer has " + std::to_string(offset_layer.out_channels) +
                      " output channels, " + std::string(to_string(variant)) + " needs " +
                      std::to_string(offset_channels(variant, main_layer.kernel)));
  }
  const auto window = WindowGeometry::of(main_layer, x.height, x.width);
  const Tensor3D raw = standard_conv(x, offset_layer);

  const std::size_t want_h = variant == DcnVariant::kPlane ? x.height : window.out_height;
  const std::size_t want_w = variant == DcnVariant::kPlane ? x.width : window.out_width;
  if (raw.height != want_h) {
    throw ConfigError("offset conv height " + std::to_string(raw.height) + " != required " +
                      std::to_string(want_h));
  }
  if (raw.width != want_w) {
    throw ConfigError("offset conv width " + std::to_string(raw.width) + " != required " +
                      std::to_string(want_w));
  }

  const std::size_t taps = variant == DcnVariant::kPlane ? 1 : window.taps();
  std::vector<Coord> disp(want_h * want_w * taps);
  for (std::size_t r = 0; r < want_h; ++r) {
    for (std::size_t s = 0; s < want_w; ++s) {
      for (std::size_t t = 0; t < taps; ++t) {
        disp[(r * want_w + s) * taps + t] = {raw.at(2 * t, r, s), raw.at(2 * t + 1, r, s)};
      }
    }
  }
  return offsets_from_displacements(variant, window, disp);
}

BliWeights bli_weights(double frac_row, double frac_col) {
  if (!(frac_row >= 0.0 && frac_row < 1.0) || !(frac_col >= 0.0 && frac_col < 1.0)) {
    throw DomainError("bilinear fractions must lie in [0, 1), got (" + std::to_string(frac_row) +
                      ", " + std::to_string(frac_col) + ")");
  }
  BliWeights w;
  w.frac_row = frac_row;
  w.frac_col = frac_col;
  // gamma is shared by all four coefficients; the rest is add/sub only.
  w.gamma = frac_row * frac_col;
  w.mu = frac_col - w.gamma;
  w.theta = frac_row - w.gamma;
  // (1-a)(1-b) >= 0 exactly; the add/sub form can round a hair below zero.
  w.eta = std::max(0.0, (1.0 - frac_row) - frac_col + w.gamma);
  return w;
}

double bli_sample(const Tensor3D& x, std::size_t c, Coord at) {
  const double max_row = static_cast<double>(x.height) - 1.0;
  const double max_col = static_cast<double>(x.width) - 1.0;
  if (!(at.row >= 0.0 && at.row <= max_row && at.col >= 0.0 && at.col <= max_col)) {
    throw DomainError("bilinear sample outside the plane");
  }
  const double r0 = std::floor(at.row);
  const double c0 = std::floor(at.col);
  const auto lo_r = static_cast<std::size_t>(r0);
  const auto lo_c = static_cast<std::size_t>(c0);
  const auto hi_r = static_cast<std::size_t>(std::ceil(at.row));
  const auto hi_c = static_cast<std::size_t>(std::ceil(at.col));
  const BliWeights w = bli_weights(at.row - r0, at.col - c0);
  return w.eta * x.at(c, lo_r, lo_c) + w.mu * x.at(c, lo_r, hi_c) +
         w.theta * x.at(c, hi_r, lo_c) + w.gamma * x.at(c, hi_r, hi_c);
}

DeformedFeatures deform_features(const Tensor3D& x, const OffsetField& offs) {
  if (offs.window.in_height != x.height || offs.window.in_width != x.width) {
    throw ConfigError("offset field plane " + std::to_string(offs.window.in_height) + "x" +
                      std::to_string(offs.window.in_width) + " does not match input " +
                      std::to_string(x.height) + "x" + std::to_string(x.width));
  }
  offs.validate();
  DeformedFeatures xd;
  xd.channels = x.channels;
  xd.out_height = offs.window.out_height;
  xd.out_width = offs.window.out_width;
  xd.taps = offs.window.taps();
  xd.data.assign(xd.channels * xd.out_height * xd.out_width * xd.taps, 0.0);
  for (std::size_t c = 0; c < x.channels; ++c) {
    offs.for_each_sample([&](std::size_t r, std::size_t s, std::size_t tap, Coord at) {
      xd.data[xd.index(c, r * xd.out_width + s, tap)] = bli_sample(x, c, at);
    });
  }
  return xd;
}

Tensor3D conv_deformed(const DeformedFeatures& xd, const ConvLayerSpec& main_layer) {
  main_layer.validate();
  if (xd.channels != main_layer.in_channels) {
    throw ConfigError("channel axis mismatch: deformed features have " +
                      std::to_string(xd.channels) + " channels, layer expects " +
                      std::to_string(main_layer.in_channels));
  }
  if (xd.taps != main_layer.kernel * main_layer.kernel) {
    throw ConfigError("tap axis mismatch: deformed features have " + std::to_string(xd.taps) +
                      " taps per window, layer kernel needs " +
                      std::to_string(main_layer.kernel * main_layer.kernel));
  }
  Tensor3D y(main_layer.out_channels, xd.out_height, xd.out_width);
  const std::size_t positions = xd.out_height * xd.out_width;
  const std::size_t taps = xd.taps;
  for (std::size_t l = 0; l < main_layer.out_channels; ++l) {
    for (std::size_t pos = 0; pos < positions; ++pos) {
      double acc = 0.0;
      for (std::size_t c = 0; c < xd.channels; ++c) {
        const double* w = &main_layer.weights[main_layer.weight_index(l, c, 0, 0)];
        const double* f = &xd.data[xd.index(c, pos, 0)];
        for (std::size_t t = 0; t < taps; ++t) acc += w[t] * f[t];
      }
      y.data[l * positions + pos] = acc + main_layer.bias_of(l);
    }
  }
  return y;
}

Tensor3D deformable_conv(const Tensor3D& x, const ConvLayerSpec& offset_layer,
                         const ConvLayerSpec& main_layer, DcnVariant variant) {
  return deformable_conv(x, compute_offsets(x, offset_layer, main_layer, variant), main_layer);
}

Tensor3D deformable_conv(const Tensor3D& x, const OffsetField& offs,
                         const ConvLayerSpec& main_layer) {
  if (offs.window != WindowGeometry::of(main_layer, x.height, x.width)) {
    throw ConfigError("offset field window does not match the main layer geometry");
  }
  return conv_deformed(deform_features(x, offs), main_layer);
}

}  // namespace dcnsim
