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

// 8-bit fixed-point mirror of the deformable pipeline. Every tensor carries a
// shared power-of-two scale (value = code * 2^-frac_bits), so rescaling is a
// shift. Accumulation is exact in int64. Sampling coordinates are Q8 (8
// fractional bits) and bilinear coefficients are Q16 integers summing to 2^16.

#include <cstdint>
#include <vector>

#include "dcnsim/deform.hpp"
#include "dcnsim/tensor.hpp"

namespace dcnsim {

inline constexpr int kCoordFracBits = 8;
inline constexpr int kCoeffFracBits = 16;

/// Largest frac_bits such that max_abs rounds to a code <= 127. Returns 7 for 0.
int choose_frac_bits(double max_abs) noexcept;

/// Round-half-up of v * 2^frac_bits, saturated to [-128, 127].
std::int8_t quantize_value(double v, int frac_bits) noexcept;

/// Arithmetic shift right by `shift` with round-half-up; left shift when negative.
std::int64_t round_shift(std::int64_t v, int shift) noexcept;

struct QTensor {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::int8_t> codes;
  int frac_bits = 0;

  double step() const noexcept;
  std::size_t index(std::size_t c, std::size_t r, std::size_t s) const noexcept {
    return (c * height + r) * width + s;
  }
  std::int8_t at(std::size_t c, std::size_t r, std::size_t s) const noexcept {
    return codes[index(c, r, s)];
  }
  Tensor3D dequantize() const;
  bool operator==(const QTensor&) const = default;
};

QTensor quantize(const Tensor3D& t);
QTensor quantize(const Tensor3D& t, int frac_bits);

struct QConvLayer {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::vector<std::int8_t> weights;
  int weight_frac_bits = 0;
  std::vector<double> bias;  // quantized to the accumulator scale at use

  static QConvLayer from(const ConvLayerSpec& layer);
  /// Float layer holding exactly the quantized weights.
  ConvLayerSpec dequantize() const;
  std::size_t weight_index(std::size_t l, std::size_t c, std::size_t i,
                           std::size_t j) const noexcept {
    return ((l * in_channels + c) * kernel + i) * kernel + j;
  }
};

/// Wide accumulator tensor with its own binary point.
struct AccTensor {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::int64_t> acc;
  int frac_bits = 0;

  bool operator==(const AccTensor&) const = default;
};

/// Requantize to int8 using the power-of-two scale chosen from the accumulator maximum.
QTensor requantize(const AccTensor& a);

AccTensor q_standard_conv_acc(const QTensor& x, const QConvLayer& layer);
QTensor q_standard_conv(const QTensor& x, const QConvLayer& layer);

/// Offset branch in fixed point. Returned coordinates lie on the Q8 grid.
OffsetField q_compute_offsets(const QTensor& x, const QConvLayer& offset_layer,
                              const QConvLayer& main_layer, DcnVariant variant);

struct QBliWeights {
  std::int32_t eta = 1 << kCoeffFracBits;
  std::int32_t mu = 0;
  std::int32_t theta = 0;
  std::int32_t gamma = 0;
};

/// Coefficients from 8-bit fractional parts; gamma first, the rest by add/sub.
QBliWeights q_bli_weights(std::uint8_t frac_row, std::uint8_t frac_col) noexcept;

/// Coordinate is rounded to Q8 first. Result stays in the input's code space.
std::int8_t q_bli_sample(const QTensor& x, std::size_t c, Coord at);

struct QDeformedFeatures {
  std::size_t channels = 0;
  std::size_t out_height = 0;
  std::size_t out_width = 0;
  std::size_t taps = 0;
  std::vector<std::int8_t> codes;
  int frac_bits = 0;

  std::size_t index(std::size_t c, std::size_t pos, std::size_t tap) const noexcept {
    return (c * out_height * out_width + pos) * taps + tap;
  }
};

QDeformedFeatures q_deform_features(const QTensor& x, const OffsetField& offs);
AccTensor q_conv_deformed_acc(const QDeformedFeatures& xd, const QConvLayer& main_layer);

QTensor q_deformable_conv(const QTensor& x, const QConvLayer& offset_layer,
                          const QConvLayer& main_layer, DcnVariant variant);
QTensor q_deformable_conv(const QTensor& x, const OffsetField& offs,
                          const QConvLayer& main_layer);

}  // namespace dcnsim
