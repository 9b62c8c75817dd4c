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

#include <cstddef>
#include <span>
#include <vector>

namespace dcnsim {

/// Channel-major (C, H, W) feature or weight container, float64 reference mode.
struct Tensor3D {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  Tensor3D() = default;
  Tensor3D(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0);
  /// Throws ConfigError when values.size() != c * h * w.
  Tensor3D(std::size_t c, std::size_t h, std::size_t w, std::vector<double> values);

  std::size_t size() const noexcept { return data.size(); }
  std::size_t index(std::size_t c, std::size_t r, std::size_t s) const noexcept {
    return (c * height + r) * width + s;
  }
  double& at(std::size_t c, std::size_t r, std::size_t s) noexcept { return data[index(c, r, s)]; }
  double at(std::size_t c, std::size_t r, std::size_t s) const noexcept {
    return data[index(c, r, s)];
  }

  bool operator==(const Tensor3D&) const = default;
};

/// Square-kernel convolution layer: weights are L_out x C x K x K, bias is L_out or empty.
struct ConvLayerSpec {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  /// Zero weights and a zero bias vector of the right sizes.
  static ConvLayerSpec zeros(std::size_t in_channels, std::size_t out_channels,
                             std::size_t kernel, std::size_t stride = 1,
                             std::size_t padding = 0);

  std::size_t weight_index(std::size_t l, std::size_t c, std::size_t i,
                           std::size_t j) const noexcept {
    return ((l * in_channels + c) * kernel + i) * kernel + j;
  }
  double weight(std::size_t l, std::size_t c, std::size_t i, std::size_t j) const noexcept {
    return weights[weight_index(l, c, i, j)];
  }
  double bias_of(std::size_t l) const noexcept { return bias.empty() ? 0.0 : bias[l]; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Sliding-window geometry of one layer applied to an H x W plane.
struct WindowGeometry {
  std::size_t in_height = 0;
  std::size_t in_width = 0;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t out_height = 0;
  std::size_t out_width = 0;

  /// Throws ConfigError if the window does not fit.
  static WindowGeometry make(std::size_t in_height, std::size_t in_width, std::size_t kernel,
                             std::size_t stride, std::size_t padding);
  static WindowGeometry of(const ConvLayerSpec& layer, std::size_t in_height,
                           std::size_t in_width) {
    return make(in_height, in_width, layer.kernel, layer.stride, layer.padding);
  }

  std::size_t taps() const noexcept { return kernel * kernel; }
  std::size_t positions() const noexcept { return out_height * out_width; }

  bool operator==(const WindowGeometry&) const = default;
};

/// (H + 2p - K) / stride + 1; throws ConfigError naming `axis` if K exceeds the padded extent.
std::size_t conv_output_extent(std::size_t extent, std::size_t kernel, std::size_t stride,
                               std::size_t padding, const char* axis);

/// Direct convolution with zero padding.
Tensor3D standard_conv(const Tensor3D& x, const ConvLayerSpec& layer);

/// Copy of x with `pad` rows/cols of edge replication on every side.
Tensor3D replicate_pad(const Tensor3D& x, std::size_t pad);

}  // namespace dcnsim
