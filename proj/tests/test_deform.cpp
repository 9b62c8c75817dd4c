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

#include <cmath>
#include <random>

#include "doctest.h"
#include "dcnsim/deform.hpp"
#include "dcnsim/errors.hpp"
#include "dcnsim/quantize.hpp"
#include "oracles.hpp"

using namespace dcnsim;

namespace {

void check_close(const Tensor3D& a, const Tensor3D& b, double tol) {
  REQUIRE(a.channels == b.channels);
  REQUIRE(a.height == b.height);
  REQUIRE(a.width == b.width);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a.data[k] - b.data[k]) <= tol);
}

}  // namespace

TEST_CASE("zero offset weights give the sliding-window taps") {
  const Tensor3D x(2, 6, 6, 1.0);
  const ConvLayerSpec main = ConvLayerSpec::zeros(2, 1, 3, 1, 0);
  const ConvLayerSpec off = ConvLayerSpec::zeros(2, 18, 3, 1, 0);
  const OffsetField f = compute_offsets(x, off, main, DcnVariant::kWindow);
  REQUIRE(f.coords.size() == 4 * 4 * 9);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t s = 0; s < 4; ++s) {
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          const Coord c = *f.sample(r, s, i, j);
          CHECK(c.row == static_cast<double>(r + i));
          CHECK(c.col == static_cast<double>(s + j));
        }
      }
    }
  }
}

TEST_CASE("constant offset bias shifts every tap and clamps at the border") {
  const Tensor3D x(1, 5, 5, 0.0);
  const ConvLayerSpec main = ConvLayerSpec::zeros(1, 1, 3, 1, 1);
  ConvLayerSpec off = ConvLayerSpec::zeros(1, 18, 3, 1, 1);
  off.bias.assign(18, 0.5);
  const OffsetField f = compute_offsets(x, off, main, DcnVariant::kWindow);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t s = 0; s < 5; ++s) {
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          const double a = std::clamp(static_cast<double>(r + i) - 1.0 + 0.5, 0.0, 4.0);
          const double b = std::clamp(static_cast<double>(s + j) - 1.0 + 0.5, 0.0, 4.0);
          CHECK(f.sample(r, s, i, j)->row == a);
          CHECK(f.sample(r, s, i, j)->col == b);
        }
      }
    }
  }
}

TEST_CASE("random offsets match conv, base position and clamp") {
  std::mt19937_64 rng(42);
  const Tensor3D x = oracle::random_tensor(rng, 3, 8, 8);
  const ConvLayerSpec main = oracle::random_layer(rng, 3, 2, 3, 1, 1);
  const ConvLayerSpec off = oracle::random_layer(rng, 3, 18, 3, 1, 1);
  const OffsetField f = compute_offsets(x, off, main, DcnVariant::kWindow);
  const Tensor3D raw = oracle::conv(x, off);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t s = 0; s < 8; ++s) {
      for (std::size_t t = 0; t < 9; ++t) {
        const double a = oracle::clampd(static_cast<double>(r + t / 3) - 1.0 + raw.at(2 * t, r, s), 7.0);
        const double b = oracle::clampd(static_cast<double>(s + t % 3) - 1.0 + raw.at(2 * t + 1, r, s), 7.0);
        const Coord c = *f.sample(r, s, t / 3, t % 3);
        CHECK(c.row == doctest::Approx(a).epsilon(1e-12));
        CHECK(c.col == doctest::Approx(b).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("wrong offset channel count is a configuration error") {
  const Tensor3D x(1, 5, 5);
  const ConvLayerSpec main = ConvLayerSpec::zeros(1, 1, 3, 1, 1);
  CHECK_THROWS_AS(compute_offsets(x, ConvLayerSpec::zeros(1, 4, 3, 1, 1), main, DcnVariant::kWindow),
                  ConfigError);
  CHECK_THROWS_AS(compute_offsets(x, ConvLayerSpec::zeros(1, 18, 3, 1, 1), main, DcnVariant::kPlane),
                  ConfigError);
  CHECK(offset_channels(DcnVariant::kPlane, 3) == 2);
  CHECK(offset_channels(DcnVariant::kWindow, 3) == 18);
}

TEST_CASE("variant names") {
  CHECK(parse_variant("DCN-I") == DcnVariant::kPlane);
  CHECK(parse_variant("dcn-ii") == DcnVariant::kWindow);
  CHECK(parse_variant("2") == DcnVariant::kWindow);
  CHECK_THROWS_AS(parse_variant("III"), ConfigError);
  CHECK(parse_variant(to_string(DcnVariant::kPlane)) == DcnVariant::kPlane);
}

TEST_CASE("bilinear weights") {
  auto w = bli_weights(0, 0);
  CHECK(w.eta == 1.0);
  CHECK(w.mu == 0.0);
  CHECK(w.theta == 0.0);
  CHECK(w.gamma == 0.0);
  w = bli_weights(0.5, 0.5);
  for (double v : {w.eta, w.mu, w.theta, w.gamma}) CHECK(v == 0.25);
  w = bli_weights(0.25, 0.75);
  CHECK(w.eta == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(w.mu == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(w.theta == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(w.gamma == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK_THROWS_AS(bli_weights(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(bli_weights(0.0, -0.1), DomainError);
  CHECK_THROWS_AS(bli_weights(std::nan(""), 0.0), DomainError);
}

TEST_CASE("bilinear sample") {
  std::mt19937_64 rng(1);
  const Tensor3D x = oracle::random_tensor(rng, 4, 16, 16);
  CHECK(bli_sample(x, 1, {2, 3}) == x.at(1, 2, 3));
  Tensor3D q(1, 2, 2, std::vector<double>{1, 2, 3, 4});
  CHECK(bli_sample(q, 0, {0.5, 0.5}) == 2.5);
  std::uniform_real_distribution<double> u(0.0, 15.0);
  for (int n = 0; n < 1000; ++n) {
    const std::size_t c = static_cast<std::size_t>(n % 4);
    const double a = u(rng), b = u(rng);
    CHECK(std::abs(bli_sample(x, c, {a, b}) - oracle::bilinear(x, c, a, b)) <= 1e-12);
  }
  CHECK_THROWS_AS(bli_sample(x, 0, {15.5, 0}), DomainError);
}

TEST_CASE("zero offsets gather the im2col matrix") {
  std::mt19937_64 rng(2);
  const Tensor3D x = oracle::random_tensor(rng, 2, 6, 7);
  const auto win = WindowGeometry::make(6, 7, 3, 1, 0);
  const DeformedFeatures xd = deform_features(x, zero_offsets(DcnVariant::kWindow, win));
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t r = 0; r < win.out_height; ++r) {
      for (std::size_t s = 0; s < win.out_width; ++s) {
        for (std::size_t t = 0; t < 9; ++t) {
          CHECK(xd.at(c, r * win.out_width + s, t) == x.at(c, r + t / 3, s + t % 3));
        }
      }
    }
  }
}

TEST_CASE("coordinates clamped to the origin gather x[c, 0, 0]") {
  std::mt19937_64 rng(3);
  const Tensor3D x = oracle::random_tensor(rng, 3, 5, 5);
  const auto win = WindowGeometry::make(5, 5, 3, 1, 1);
  const std::vector<Coord> d(win.positions() * 9, Coord{-50.0, -50.0});
  const DeformedFeatures xd = deform_features(x, offsets_from_displacements(DcnVariant::kWindow, win, d));
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t p = 0; p < win.positions(); ++p) {
      for (std::size_t t = 0; t < 9; ++t) CHECK(xd.at(c, p, t) == x.at(c, 0, 0));
    }
  }
}

TEST_CASE("deformed features equal per-element bilinear samples") {
  std::mt19937_64 rng(7);
  const Tensor3D x = oracle::random_tensor(rng, 3, 9, 9);
  const auto win = WindowGeometry::make(9, 9, 3, 2, 1);
  const auto d = oracle::uniform(rng, win.positions() * 9 * 2, -3.0, 3.0);
  std::vector<Coord> disp;
  for (std::size_t k = 0; k < d.size(); k += 2) disp.push_back({d[k], d[k + 1]});
  const OffsetField f = offsets_from_displacements(DcnVariant::kWindow, win, disp);
  const DeformedFeatures xd = deform_features(x, f);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t r = 0; r < win.out_height; ++r) {
      for (std::size_t s = 0; s < win.out_width; ++s) {
        for (std::size_t t = 0; t < 9; ++t) {
          const Coord at = *f.sample(r, s, t / 3, t % 3);
          CHECK(xd.at(c, r * win.out_width + s, t) == bli_sample(x, c, at));
        }
      }
    }
  }
}

TEST_CASE("zero offset branch collapses to standard_conv") {
  std::mt19937_64 rng(4);
  const Tensor3D x = oracle::random_tensor(rng, 3, 7, 7);
  const ConvLayerSpec main = oracle::random_layer(rng, 3, 4, 3, 1, 1);
  const Tensor3D want = standard_conv(x, main);
  // The plane-sharing variant reads the zero ring for padded taps.
  check_close(deformable_conv(x, ConvLayerSpec::zeros(3, 2, 3, 1, 1), main, DcnVariant::kPlane), want, 1e-12);
  // Per-window coordinates clamp, which equals standard conv on an edge-replicated input.
  const Tensor3D y = deformable_conv(x, ConvLayerSpec::zeros(3, 18, 3, 1, 1), main, DcnVariant::kWindow);
  ConvLayerSpec unpadded = main;
  unpadded.padding = 0;
  check_close(y, standard_conv(replicate_pad(x, 1), unpadded), 1e-12);
}

TEST_CASE("plane offset of one half averages the 2x2 neighbourhood") {
  std::mt19937_64 rng(6);
  const Tensor3D x = oracle::random_tensor(rng, 1, 4, 4);
  ConvLayerSpec main = ConvLayerSpec::zeros(1, 1, 1);
  main.weights = {1.0};
  ConvLayerSpec off = ConvLayerSpec::zeros(1, 2, 1);
  off.bias = {0.5, 0.5};
  const Tensor3D y = deformable_conv(x, off, main, DcnVariant::kPlane);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t s = 0; s < 4; ++s) {
      const double a = std::min(r + 0.5, 3.0), b = std::min(s + 0.5, 3.0);
      CHECK(y.at(0, r, s) == doctest::Approx(oracle::bilinear(x, 0, a, b)).epsilon(1e-14));
    }
  }
  CHECK(y.at(0, 0, 0) == doctest::Approx((x.at(0, 0, 0) + x.at(0, 0, 1) + x.at(0, 1, 0) + x.at(0, 1, 1)) / 4));
}

TEST_CASE("end-to-end matches the monolithic oracle for both variants") {
  std::mt19937_64 rng(8);
  for (DcnVariant v : {DcnVariant::kPlane, DcnVariant::kWindow}) {
    const Tensor3D x = oracle::random_tensor(rng, 3, 10, 9);
    const ConvLayerSpec main = oracle::random_layer(rng, 3, 2, 3, v == DcnVariant::kPlane ? 1 : 2, 1);
    const ConvLayerSpec off =
        v == DcnVariant::kPlane ? oracle::random_layer(rng, 3, 2, 3, 1, 1, 0.5)
                                : oracle::random_layer(rng, 3, 18, 3, 2, 1, 0.5);
    check_close(deformable_conv(x, off, main, v), oracle::deformable(x, off, main, v), 1e-10);
  }
}

TEST_CASE("linearity in x with injected offsets") {
  std::mt19937_64 rng(10);
  const Tensor3D x = oracle::random_tensor(rng, 2, 8, 8);
  ConvLayerSpec main = oracle::random_layer(rng, 2, 3, 3, 1, 1);
  main.bias.assign(3, 0.0);
  const auto win = WindowGeometry::of(main, 8, 8);
  const auto d = oracle::uniform(rng, win.positions() * 18, -2.0, 2.0);
  std::vector<Coord> disp;
  for (std::size_t k = 0; k < d.size(); k += 2) disp.push_back({d[k], d[k + 1]});
  const OffsetField f = offsets_from_displacements(DcnVariant::kWindow, win, disp);
  Tensor3D ax = x;
  for (auto& v : ax.data) v *= 3.0;
  Tensor3D want = deformable_conv(x, f, main);
  for (auto& v : want.data) v *= 3.0;
  check_close(deformable_conv(ax, f, main), want, 1e-12);
}

TEST_CASE("quantized pipeline tracks the float pipeline") {
  std::mt19937_64 rng(12);
  for (DcnVariant v : {DcnVariant::kPlane, DcnVariant::kWindow}) {
    const QTensor qx = quantize(oracle::random_tensor(rng, 2, 8, 8, -1.0, 1.0));
    const QConvLayer qm = QConvLayer::from(oracle::random_layer(rng, 2, 2, 3, 1, 1, 0.3));
    const auto win = WindowGeometry::make(8, 8, 3, 1, 1);
    const std::size_t n = v == DcnVariant::kPlane ? 64 : win.positions() * 9;
    std::vector<Coord> disp;
    std::uniform_int_distribution<int> q8(-512, 512);
    for (std::size_t k = 0; k < n; ++k) disp.push_back({q8(rng) / 256.0, q8(rng) / 256.0});
    const OffsetField f = offsets_from_displacements(v, win, disp);
    const QTensor qy = q_deformable_conv(qx, f, qm);
    const Tensor3D y = deformable_conv(qx.dequantize(), f, qm.dequantize());
    const Tensor3D dq = qy.dequantize();
    for (std::size_t k = 0; k < y.size(); ++k) CHECK(std::abs(dq.data[k] - y.data[k]) <= 2 * qy.step());
  }
}
