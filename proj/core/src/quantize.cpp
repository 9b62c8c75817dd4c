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

#include "dcnsim/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "dcnsim/errors.hpp"

namespace dcnsim {
namespace {

constexpr int kMinFracBits = -48;
constexpr int kMaxFracBits = 48;

std::int64_t quantize_wide(double v, int frac_bits) {
  return static_cast<std::int64_t>(std::floor(std::ldexp(v, frac_bits) + 0.5));
}

std::int8_t saturate8(std::int64_t v) noexcept {
  return static_cast<std::int8_t>(std::clamp<std::int64_t>(v, -128, 127));
}

void check_channels(std::size_t have, std::size_t want) {
  if (have != want) {
    throw ConfigError("channel axis mismatch: input has " + std::to_string(have) +
                      " channels, layer expects " + std::to_string(want));
  }
}

// Integer conv over a zero-padded int8 plane; bias folded in at the accumulator scale.
AccTensor conv_acc(const QTensor& x, const QConvLayer& layer) {
  check_channels(x.channels, layer.in_channels);
  const auto g = WindowGeometry::make(x.height, x.width, layer.kernel, layer.stride,
                                      layer.padding);
  AccTensor y;
  y.channels = layer.out_channels;
  y.height = g.out_height;
  y.width = g.out_width;
  y.frac_bits = x.frac_bits + layer.weight_frac_bits;
  y.acc.assign(y.channels * y.height * y.width, 0);
  const auto pad = static_cast<std::ptrdiff_t>(layer.padding);
  const auto h = static_cast<std::ptrdiff_t>(x.height);
  const auto w = static_cast<std::ptrdiff_t>(x.width);
  for (std::size_t l = 0; l < layer.out_channels; ++l) {
    const std::int64_t b =
        layer.bias.empty() ? 0 : quantize_wide(layer.bias[l], y.frac_bits);
    for (std::size_t r = 0; r < g.out_height; ++r) {
      for (std::size_t s = 0; s < g.out_width; ++s) {
        std::int64_t acc = 0;
        const auto r0 = static_cast<std::ptrdiff_t>(r * layer.stride) - pad;
        const auto s0 = static_cast<std::ptrdiff_t>(s * layer.stride) - pad;
        for (std::size_t c = 0; c < x.channels; ++c) {
          for (std::size_t i = 0; i < layer.kernel; ++i) {
            const auto row = r0 + static_cast<std::ptrdiff_t>(i);
            if (row < 0 || row >= h) continue;
            for (std::size_t j = 0; j < layer.kernel; ++j) {
              const auto col = s0 + static_cast<std::ptrdiff_t>(j);
              if (col < 0 || col >= w) continue;
              acc += static_cast<std::int64_t>(layer.weights[layer.weight_index(l, c, i, j)]) *
                     x.at(c, static_cast<std::size_t>(row), static_cast<std::size_t>(col));
            }
          }
        }
        y.acc[(l * y.height + r) * y.width + s] = acc + b;
      }
    }
  }
  return y;
}

}  // namespace

int choose_frac_bits(double max_abs) noexcept {
  if (!(max_abs > 0.0) || !std::isfinite(max_abs)) return 7;
  int f = kMaxFracBits;
  while (f > kMinFracBits && quantize_wide(max_abs, f) > 127) --f;
  return f;
}

std::int8_t quantize_value(double v, int frac_bits) noexcept {
  return saturate8(quantize_wide(v, frac_bits));
}

std::int64_t round_shift(std::int64_t v, int shift) noexcept {
  if (shift <= 0) return v * (std::int64_t{1} << -shift);
  const std::int64_t half = std::int64_t{1} << (shift - 1);
  // >> on negative int64 is arithmetic (floor) in C++20.
  return (v + half) >> shift;
}

double QTensor::step() const noexcept { return std::ldexp(1.0, -frac_bits); }

Tensor3D QTensor::dequantize() const {
  Tensor3D t(channels, height, width);
  for (std::size_t k = 0; k < codes.size(); ++k) t.data[k] = std::ldexp(codes[k], -frac_bits);
  return t;
}

QTensor quantize(const Tensor3D& t) {
  double m = 0.0;
  for (double v : t.data) m = std::max(m, std::abs(v));
  return quantize(t, choose_frac_bits(m));
}

QTensor quantize(const Tensor3D& t, int frac_bits) {
  QTensor q;
  q.channels = t.channels;
  q.height = t.height;
  q.width = t.width;
  q.frac_bits = frac_bits;
  q.codes.resize(t.data.size());
  for (std::size_t k = 0; k < t.data.size(); ++k) q.codes[k] = quantize_value(t.data[k], frac_bits);
  return q;
}

QConvLayer QConvLayer::from(const ConvLayerSpec& layer) {
  layer.validate();
  QConvLayer q;
  q.in_channels = layer.in_channels;
  q.out_channels = layer.out_channels;
  q.kernel = layer.kernel;
  q.stride = layer.stride;
  q.padding = layer.padding;
  double m = 0.0;
  for (double v : layer.weights) m = std::max(m, std::abs(v));
  q.weight_frac_bits = choose_frac_bits(m);
  q.weights.resize(layer.weights.size());
  for (std::size_t k = 0; k < layer.weights.size(); ++k) {
    q.weights[k] = quantize_value(layer.weights[k], q.weight_frac_bits);
  }
  q.bias = layer.bias;
  return q;
}

ConvLayerSpec QConvLayer::dequantize() const {
  ConvLayerSpec f;
  f.in_channels = in_channels;
  f.out_channels = out_channels;
  f.kernel = kernel;
  f.stride = stride;
  f.padding = padding;
  f.weights.resize(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    f.weights[k] = std::ldexp(weights[k], -weight_frac_bits);
  }
  f.bias = bias;
  return f;
}

QTensor requantize(const AccTensor& a) {
  std::int64_t m = 0;
  for (std::int64_t v : a.acc) m = std::max(m, v < 0 ? -v : v);
  const int out_frac = choose_frac_bits(std::ldexp(static_cast<double>(m), -a.frac_bits));
  QTensor q;
  q.channels = a.channels;
  q.height = a.height;
  q.width = a.width;
  q.frac_bits = out_frac;
  q.codes.resize(a.acc.size());
  const int shift = a.frac_bits - out_frac;
  for (std::size_t k = 0; k < a.acc.size(); ++k) q.codes[k] = saturate8(round_shift(a.acc[k], shift));
  return q;
}

AccTensor q_standard_conv_acc(const QTensor& x, const QConvLayer& layer) {
  return conv_acc(x, layer);
}

QTensor q_standard_conv(const QTensor& x, const QConvLayer& layer) {
  return requantize(conv_acc(x, layer));
}

OffsetField q_compute_offsets(const QTensor& x, const QConvLayer& offset_layer,
                              const QConvLayer& main_layer, DcnVariant variant) {
  if (offset_layer.out_channels != offset_channels(variant, main_layer.kernel)) {
    throw ConfigError("offset layer has " + std::to_string(offset_layer.out_channels) +
                      " output channels, " + std::string(to_string(variant)) + " needs " +
                      std::to_string(offset_channels(variant, main_layer.kernel)));
  }
  const auto window = WindowGeometry::make(x.height, x.width, main_layer.kernel,
                                           main_layer.stride, main_layer.padding);
  const AccTensor raw = conv_acc(x, offset_layer);
  const std::size_t want_h = variant == DcnVariant::kPlane ? x.height : window.out_height;
  const std::size_t want_w = variant == DcnVariant::kPlane ? x.width : window.out_width;
  if (raw.height != want_h || raw.width != want_w) {
    throw ConfigError("offset conv output " + std::to_string(raw.height) + "x" +
                      std::to_string(raw.width) + " != required " + std::to_string(want_h) +
                      "x" + std::to_string(want_w));
  }

  OffsetField offs;
  offs.variant = variant;
  offs.window = window;
  offs.coords.resize(offs.expected_size());
  const int shift = raw.frac_bits - kCoordFracBits;
  const std::int64_t one = std::int64_t{1} << kCoordFracBits;
  const std::int64_t max_row = (static_cast<std::int64_t>(x.height) - 1) * one;
  const std::int64_t max_col = (static_cast<std::int64_t>(x.width) - 1) * one;
  const std::size_t taps = variant == DcnVariant::kPlane ? 1 : window.taps();
  const std::size_t k = window.kernel;
  const auto pad = static_cast<std::int64_t>(window.padding);

  for (std::size_t r = 0; r < want_h; ++r) {
    for (std::size_t s = 0; s < want_w; ++s) {
      for (std::size_t t = 0; t < taps; ++t) {
        std::int64_t base_row = static_cast<std::int64_t>(r);
        std::int64_t base_col = static_cast<std::int64_t>(s);
        if (variant == DcnVariant::kWindow) {
          base_row = static_cast<std::int64_t>(r * window.stride + t / k) - pad;
          base_col = static_cast<std::int64_t>(s * window.stride + t % k) - pad;
        }
        const std::int64_t d_row =
            round_shift(raw.acc[((2 * t) * raw.height + r) * raw.width + s], shift);
        const std::int64_t d_col =
            round_shift(raw.acc[((2 * t + 1) * raw.height + r) * raw.width + s], shift);
        const std::int64_t q_row = std::clamp<std::int64_t>(base_row * one + d_row, 0, max_row);
        const std::int64_t q_col = std::clamp<std::int64_t>(base_col * one + d_col, 0, max_col);
        offs.coords[(r * want_w + s) * taps + t] = {
            std::ldexp(static_cast<double>(q_row), -kCoordFracBits),
            std::ldexp(static_cast<double>(q_col), -kCoordFracBits)};
      }
    }
  }
  return offs;
}

QBliWeights q_bli_weights(std::uint8_t frac_row, std::uint8_t frac_col) noexcept {
  constexpr std::int32_t unit = 1 << kCoordFracBits;
  QBliWeights w;
  w.gamma = static_cast<std::int32_t>(frac_row) * frac_col;
  w.mu = unit * frac_col - w.gamma;
  w.theta = unit * frac_row - w.gamma;
  w.eta = unit * unit - unit * frac_row - unit * frac_col + w.gamma;
  return w;
}

std::int8_t q_bli_sample(const QTensor& x, std::size_t c, Coord at) {
  const auto q_row = static_cast<std::int64_t>(std::llround(std::ldexp(at.row, kCoordFracBits)));
  const auto q_col = static_cast<std::int64_t>(std::llround(std::ldexp(at.col, kCoordFracBits)));
  const std::int64_t one = std::int64_t{1} << kCoordFracBits;
  if (q_row < 0 || q_col < 0 || q_row > (static_cast<std::int64_t>(x.height) - 1) * one ||
      q_col > (static_cast<std::int64_t>(x.width) - 1) * one) {
    throw DomainError("bilinear sample outside the plane");
  }
  const auto lo_r = static_cast<std::size_t>(q_row >> kCoordFracBits);
  const auto lo_c = static_cast<std::size_t>(q_col >> kCoordFracBits);
  const auto fr = static_cast<std::uint8_t>(q_row & (one - 1));
  const auto fc = static_cast<std::uint8_t>(q_col & (one - 1));
  const std::size_t hi_r = fr ? lo_r + 1 : lo_r;
  const std::size_t hi_c = fc ? lo_c + 1 : lo_c;
  const QBliWeights w = q_bli_weights(fr, fc);
  const std::int64_t acc = std::int64_t{w.eta} * x.at(c, lo_r, lo_c) +
                           std::int64_t{w.mu} * x.at(c, lo_r, hi_c) +
                           std::int64_t{w.theta} * x.at(c, hi_r, lo_c) +
                           std::int64_t{w.gamma} * x.at(c, hi_r, hi_c);
  return saturate8(round_shift(acc, kCoeffFracBits));
}

QDeformedFeatures q_deform_features(const QTensor& x, const OffsetField& offs) {
  if (offs.window.in_height != x.height || offs.window.in_width != x.width) {
    throw ConfigError("offset field plane does not match the quantized input");
  }
  offs.validate();
  QDeformedFeatures xd;
  xd.channels = x.channels;
  xd.out_height = offs.window.out_height;
  xd.out_width = offs.window.out_width;
  xd.taps = offs.window.taps();
  xd.frac_bits = x.frac_bits;
  xd.codes.assign(xd.channels * xd.out_height * xd.out_width * xd.taps, 0);
  for (std::size_t c = 0; c < x.channels; ++c) {
    offs.for_each_sample([&](std::size_t r, std::size_t s, std::size_t tap, Coord at) {
      xd.codes[xd.index(c, r * xd.out_width + s, tap)] = q_bli_sample(x, c, at);
    });
  }
  return xd;
}

AccTensor q_conv_deformed_acc(const QDeformedFeatures& xd, const QConvLayer& main_layer) {
  check_channels(xd.channels, main_layer.in_channels);
  if (xd.taps != main_layer.kernel * main_layer.kernel) {
    throw ConfigError("tap axis mismatch between deformed features and main kernel");
  }
  AccTensor y;
  y.channels = main_layer.out_channels;
  y.height = xd.out_height;
  y.width = xd.out_width;
  y.frac_bits = xd.frac_bits + main_layer.weight_frac_bits;
  const std::size_t positions = xd.out_height * xd.out_width;
  y.acc.assign(y.channels * positions, 0);
  for (std::size_t l = 0; l < main_layer.out_channels; ++l) {
    const std::int64_t b =
        main_layer.bias.empty() ? 0 : quantize_wide(main_layer.bias[l], y.frac_bits);
    for (std::size_t pos = 0; pos < positions; ++pos) {
      std::int64_t acc = 0;
      for (std::size_t c = 0; c < xd.channels; ++c) {
        const std::int8_t* w = &main_layer.weights[main_layer.weight_index(l, c, 0, 0)];
        const std::int8_t* f = &xd.codes[xd.index(c, pos, 0)];
        for (std::size_t t = 0; t < xd.taps; ++t) acc += std::int64_t{w[t]} * f[t];
      }
      y.acc[l * positions + pos] = acc + b;
    }
  }
  return y;
}

QTensor q_deformable_conv(const QTensor& x, const QConvLayer& offset_layer,
                          const QConvLayer& main_layer, DcnVariant variant) {
  return q_deformable_conv(x, q_compute_offsets(x, offset_layer, main_layer, variant),
                           main_layer);
}

QTensor q_deformable_conv(const QTensor& x, const OffsetField& offs,
                          const QConvLayer& main_layer) {
  return requantize(q_conv_deformed_acc(q_deform_features(x, offs), main_layer));
}

}  // namespace dcnsim
