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

#include "dcnsim/tensor.hpp"

#include <algorithm>
#include <string>

#include "dcnsim/errors.hpp"

namespace dcnsim {

Tensor3D::Tensor3D(std::size_t c, std::size_t h, std::size_t w, double fill)
    : channels(c), height(h), width(w), data(c * h * w, fill) {}

Tensor3D::Tensor3D(std::size_t c, std::size_t h, std::size_t w, std::vector<double> values)
    : channels(c), height(h), width(w), data(std::move(values)) {
  if (data.size() != c * h * w) {
    throw ConfigError("tensor data length " + std::to_string(data.size()) +
                      " does not match C*H*W = " + std::to_string(c * h * w));
  }
}

ConvLayerSpec ConvLayerSpec::zeros(std::size_t in_channels, std::size_t out_channels,
                                   std::size_t kernel, std::size_t stride,
                                   std::size_t padding) {
  ConvLayerSpec layer;
  layer.in_channels = in_channels;
  layer.out_channels = out_channels;
  layer.kernel = kernel;
  layer.stride = stride;
  layer.padding = padding;
  layer.weights.assign(out_channels * in_channels * kernel * kernel, 0.0);
  layer.bias.assign(out_channels, 0.0);
  return layer;
}

void ConvLayerSpec::validate() const {
  if (kernel < 1) throw ConfigError("conv layer: kernel must be >= 1");
  if (stride < 1) throw ConfigError("conv layer: stride must be >= 1");
  if (in_channels < 1) throw ConfigError("conv layer: in_channels must be >= 1");
  if (out_channels < 1) throw ConfigError("conv layer: out_channels must be >= 1");
  const std::size_t expected = out_channels * in_channels * kernel * kernel;
  if (weights.size() != expected) {
    throw ConfigError("conv layer: weight length " + std::to_string(weights.size()) +
                      " != L_out*C*K*K = " + std::to_string(expected));
  }
  if (!bias.empty() && bias.size() != out_channels) {
    throw ConfigError("conv layer: bias length " + std::to_string(bias.size()) +
                      " != L_out = " + std::to_string(out_channels));
  }
}

std::size_t conv_output_extent(std::size_t extent, std::size_t kernel, std::size_t stride,
                               std::size_t padding, const char* axis) {
  if (stride == 0) throw ConfigError(std::string("stride must be >= 1 on ") + axis);
  if (extent + 2 * padding < kernel) {
    throw ConfigError(std::string("kernel ") + std::to_string(kernel) +
                      " exceeds padded " + axis + " extent " +
                      std::to_string(extent + 2 * padding));
  }
  return (extent + 2 * padding - kernel) / stride + 1;
}

WindowGeometry WindowGeometry::make(std::size_t in_height, std::size_t in_width,
                                    std::size_t kernel, std::size_t stride,
                                    std::size_t padding) {
  if (kernel < 1) throw ConfigError("kernel must be >= 1");
  WindowGeometry g;
  g.in_height = in_height;
  g.in_width = in_width;
  g.kernel = kernel;
  g.stride = stride;
  g.padding = padding;
  g.out_height = conv_output_extent(in_height, kernel, stride, padding, "height");
  g.out_width = conv_output_extent(in_width, kernel, stride, padding, "width");
  return g;
}

Tensor3D standard_conv(const Tensor3D& x, const ConvLayerSpec& layer) {
  layer.validate();
  if (x.channels != layer.in_channels) {
    throw ConfigError("channel axis mismatch: input has " + std::to_string(x.channels) +
                      " channels, layer expects " + std::to_string(layer.in_channels));
  }
  const auto g = WindowGeometry::of(layer, x.height, x.width);
  const auto pad = static_cast<std::ptrdiff_t>(layer.padding);
  const auto h = static_cast<std::ptrdiff_t>(x.height);
  const auto w = static_cast<std::ptrdiff_t>(x.width);
  const std::size_t k = layer.kernel;

  Tensor3D y(layer.out_channels, g.out_height, g.out_width);
  for (std::size_t l = 0; l < layer.out_channels; ++l) {
    for (std::size_t r = 0; r < g.out_height; ++r) {
      for (std::size_t s = 0; s < g.out_width; ++s) {
        double acc = 0.0;
        const auto r0 = static_cast<std::ptrdiff_t>(r * layer.stride) - pad;
        const auto s0 = static_cast<std::ptrdiff_t>(s * layer.stride) - pad;
        for (std::size_t c = 0; c < x.channels; ++c) {
          for (std::size_t i = 0; i < k; ++i) {
            const auto row = r0 + static_cast<std::ptrdiff_t>(i);
            if (row < 0 || row >= h) continue;
            for (std::size_t j = 0; j < k; ++j) {
              const auto col = s0 + static_cast<std::ptrdiff_t>(j);
              if (col < 0 || col >= w) continue;
              acc += layer.weight(l, c, i, j) *
                     x.at(c, static_cast<std::size_t>(row), static_cast<std::size_t>(col));
            }
          }
        }
        y.at(l, r, s) = acc + layer.bias_of(l);
      }
    }
  }
  return y;
}

Tensor3D replicate_pad(const Tensor3D& x, std::size_t pad) {
  Tensor3D out(x.channels, x.height + 2 * pad, x.width + 2 * pad);
  for (std::size_t c = 0; c < x.channels; ++c) {
    for (std::size_t r = 0; r < out.height; ++r) {
      const std::size_t src_r = r < pad ? 0 : std::min(r - pad, x.height - 1);
      for (std::size_t s = 0; s < out.width; ++s) {
        const std::size_t src_s = s < pad ? 0 : std::min(s - pad, x.width - 1);
        out.at(c, r, s) = x.at(c, src_r, src_s);
      }
    }
  }
  return out;
}

}  // namespace dcnsim
