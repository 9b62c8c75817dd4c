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

// Functional reference for deformable convolution:
//   stage 1  offset conv -> absolute sampling coordinates (clamped to the plane)
//   stage 2  bilinear interpolation of the four integer neighbours
//   stage 3  standard convolution over the deformed features
//
// Two offset-sharing variants are modelled. kPlane (DCN-I) assigns one coordinate
// to every position of the input plane and the window reads the resampled plane;
// kWindow (DCN-II) assigns one coordinate to every (window, tap) pair. Both share
// coordinates across channels.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dcnsim/tensor.hpp"

namespace dcnsim {

enum class DcnVariant { kPlane, kWindow };

std::string_view to_string(DcnVariant v) noexcept;
/// Accepts "DCN-I"/"DCN-II" (any case), "I"/"II", "1"/"2". Throws ConfigError.
DcnVariant parse_variant(std::string_view name);

/// Offset-branch output channels: 2 for kPlane, 2*K*K for kWindow.
std::size_t offset_channels(DcnVariant v, std::size_t kernel) noexcept;

/// Fractional (row, col) position in the input plane; row is alpha, col is beta.
struct Coord {
  double row = 0.0;
  double col = 0.0;
  bool operator==(const Coord&) const = default;
};

Coord clamp_coord(Coord c, std::size_t height, std::size_t width) noexcept;

struct OffsetField {
  DcnVariant variant = DcnVariant::kWindow;
  WindowGeometry window;
  std::vector<Coord> coords;

  /// Grid the coordinates live on: the output positions (kWindow) or the input plane (kPlane).
  std::size_t field_height() const noexcept;
  std::size_t field_width() const noexcept;
  std::size_t samples_per_position() const noexcept;
  std::size_t expected_size() const noexcept;
  /// Number of distinct bilinear evaluations the field implies.
  std::size_t deformed_count() const noexcept { return coords.size(); }

  /// Size and bounds check; throws ConfigError.
  void validate() const;

  /// Coordinate read by tap (i, j) of output window (r, s). nullopt for a kPlane
  /// tap that falls in the zero-padding ring.
  std::optional<Coord> sample(std::size_t r, std::size_t s, std::size_t i,
                              std::size_t j) const noexcept;

  /// fn(out_row, out_col, tap, coord) for every tap that reads the plane, in
  /// row-major output order and row-major tap order.
  template <class Fn>
  void for_each_sample(Fn&& fn) const {
    const std::size_t k = window.kernel;
    for (std::size_t r = 0; r < window.out_height; ++r) {
      for (std::size_t s = 0; s < window.out_width; ++s) {
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = 0; j < k; ++j) {
            if (auto c = sample(r, s, i, j)) fn(r, s, i * k + j, *c);
          }
        }
      }
    }
  }
};

/// Builds a field from raw displacements (one per field entry): adds the base
/// sliding-window position and clamps to the plane.
OffsetField offsets_from_displacements(DcnVariant variant, const WindowGeometry& window,
                                       std::span<const Coord> displacements);

/// All-zero displacement field.
OffsetField zero_offsets(DcnVariant variant, const WindowGeometry& window);

/// Channel 2t holds the row offset of tap t, channel 2t+1 the column offset
/// (t = 0 for kPlane). kPlane requires the offset conv to preserve H x W;
/// kWindow requires its output to match the main layer's output positions.
OffsetField compute_offsets(const Tensor3D& x, const ConvLayerSpec& offset_layer,
                            const ConvLayerSpec& main_layer, DcnVariant variant);

struct BliWeights {
  double eta = 1.0;    // (floor row, floor col)
  double mu = 0.0;     // (floor row, ceil col)
  double theta = 0.0;  // (ceil row, floor col)
  double gamma = 0.0;  // (ceil row, ceil col)
  double frac_row = 0.0;
  double frac_col = 0.0;
};

/// Throws DomainError unless both fractions are in [0, 1).
BliWeights bli_weights(double frac_row, double frac_col);

/// Bilinear sample of channel c at a clamped coordinate. Throws DomainError out of bounds.
double bli_sample(const Tensor3D& x, std::size_t c, Coord at);

/// Deformed features x': channel-major, then output position, then kernel tap.
struct DeformedFeatures {
  std::size_t channels = 0;
  std::size_t out_height = 0;
  std::size_t out_width = 0;
  std::size_t taps = 0;
  std::vector<double> data;

  std::size_t index(std::size_t c, std::size_t pos, std::size_t tap) const noexcept {
    return (c * out_height * out_width + pos) * taps + tap;
  }
  double at(std::size_t c, std::size_t pos, std::size_t tap) const noexcept {
    return data[index(c, pos, tap)];
  }
};

DeformedFeatures deform_features(const Tensor3D& x, const OffsetField& offs);

/// Stage 3: standard convolution over reorganised features.
Tensor3D conv_deformed(const DeformedFeatures& xd, const ConvLayerSpec& main_layer);

/// Full three-stage pipeline.
Tensor3D deformable_conv(const Tensor3D& x, const ConvLayerSpec& offset_layer,
                         const ConvLayerSpec& main_layer, DcnVariant variant);

/// Stages 2-3 with an externally supplied offset field.
Tensor3D deformable_conv(const Tensor3D& x, const OffsetField& offs,
                         const ConvLayerSpec& main_layer);

}  // namespace dcnsim
