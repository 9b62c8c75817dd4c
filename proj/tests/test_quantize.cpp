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

#include <random>

#include "doctest.h"
#include "dcnsim/quantize.hpp"
#include "oracles.hpp"

using namespace dcnsim;

TEST_CASE("power-of-two scale selection") {
  CHECK(choose_frac_bits(0.0) == 7);
  CHECK(choose_frac_bits(0.99) == 7);
  CHECK(choose_frac_bits(1.0) == 6);
  CHECK(choose_frac_bits(100.0) == 0);
  CHECK(quantize_value(0.5, 7) == 64);
  CHECK(quantize_value(-2.0, 7) == -128);
  CHECK(quantize_value(5.0, 7) == 127);
  CHECK(round_shift(5, 1) == 3);
  CHECK(round_shift(-5, 1) == -2);
  CHECK(round_shift(3, -2) == 12);
}

TEST_CASE("fixed-point coefficients sum to one exactly") {
  for (int a = 0; a < 256; a += 5) {
    for (int b = 0; b < 256; b += 7) {
      const QBliWeights w = q_bli_weights(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b));
      CHECK(w.eta + w.mu + w.theta + w.gamma == 1 << kCoeffFracBits);
      CHECK(w.gamma == a * b);
      CHECK(w.eta >= 0);
    }
  }
}

TEST_CASE("quantize then dequantize stays within half a step") {
  std::mt19937_64 rng(3);
  const Tensor3D x = oracle::random_tensor(rng, 2, 5, 5, -3.0, 3.0);
  const QTensor q = quantize(x);
  const Tensor3D back = q.dequantize();
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(back.data[k] - x.data[k]) <= q.step() / 2 + 1e-15);
}

TEST_CASE("zero offsets are bit-exact against the quantized standard conv") {
  std::mt19937_64 rng(4);
  const QTensor qx = quantize(oracle::random_tensor(rng, 3, 7, 6));
  const QConvLayer qm = QConvLayer::from(oracle::random_layer(rng, 3, 2, 3, 1, 0));
  const QConvLayer qoff = QConvLayer::from(ConvLayerSpec::zeros(3, 18, 3, 1, 0));
  CHECK(q_deformable_conv(qx, qoff, qm, DcnVariant::kWindow) == q_standard_conv(qx, qm));
  const QConvLayer qm1 = QConvLayer::from(oracle::random_layer(rng, 3, 2, 3, 1, 1));
  const QConvLayer qplane = QConvLayer::from(ConvLayerSpec::zeros(3, 2, 3, 1, 1));
  CHECK(q_deformable_conv(qx, qplane, qm1, DcnVariant::kPlane) == q_standard_conv(qx, qm1));
}

TEST_CASE("quantized sample at an integer coordinate is the stored code") {
  std::mt19937_64 rng(5);
  const QTensor qx = quantize(oracle::random_tensor(rng, 2, 4, 4));
  CHECK(q_bli_sample(qx, 1, {2, 1}) == qx.at(1, 2, 1));
  CHECK(q_bli_sample(qx, 0, {3, 3}) == qx.at(0, 3, 3));
}
