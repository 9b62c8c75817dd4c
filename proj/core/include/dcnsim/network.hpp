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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcnsim/deform.hpp"
#include "dcnsim/tensor.hpp"

namespace dcnsim {

/// Spatial change applied to the previous layer's output before this layer.
enum class Resample { kNone, kPool2, kUpsample2 };

/// Shape-only description of one conv layer; weights are generated when needed.
struct LayerSpec {
  std::string name;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 1;
  std::size_t in_height = 0;
  std::size_t in_width = 0;
  Resample resample = Resample::kNone;
  std::optional<DcnVariant> deform;

  bool deformable() const noexcept { return deform.has_value(); }
  WindowGeometry window() const { return WindowGeometry::make(in_height, in_width, kernel, stride, padding); }
  std::size_t out_height() const { return window().out_height; }
  std::size_t out_width() const { return window().out_width; }
  /// Zero-weight layer of this shape.
  ConvLayerSpec conv() const;
  /// Offset branch: 2 (plane-preserving) or 2*K*K (same window as the layer) channels.
  ConvLayerSpec offset_conv() const;
};

struct NetworkSpec {
  std::string name;
  std::size_t in_channels = 0;
  std::size_t in_height = 0;
  std::size_t in_width = 0;
  std::vector<LayerSpec> layers;

  std::size_t deformable_count() const noexcept;
  /// Checks channel and spatial chaining; throws ConfigError naming the layer.
  void validate() const;
};

/// VGG19-{3,8,F}, SegNet-{3,8,F} and their tiny-* variants (channels / 8, input / 4).
/// Deformable layers are counted from the output end. "tiny-VGG-3" is accepted for
/// "tiny-VGG19-3". Throws ConfigError for an unknown name.
NetworkSpec load_benchmark(std::string_view name, DcnVariant variant = DcnVariant::kWindow);

/// Canonical benchmark names.
std::vector<std::string> list_benchmarks();

}  // namespace dcnsim
