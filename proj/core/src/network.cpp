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

#include "dcnsim/network.hpp"

#include <algorithm>
#include <cctype>

#include "dcnsim/errors.hpp"

namespace dcnsim {
namespace {

struct ConvPlan {
  std::size_t out_channels;
  Resample resample;
  bool keep_width;  // class count: not shrunk in tiny variants
  const char* name;
};

std::vector<ConvPlan> vgg19_plan(bool with_fc) {
  std::vector<ConvPlan> p = {
      {64, Resample::kNone, false, "conv1_1"},    {64, Resample::kNone, false, "conv1_2"},
      {128, Resample::kPool2, false, "conv2_1"},  {128, Resample::kNone, false, "conv2_2"},
      {256, Resample::kPool2, false, "conv3_1"},  {256, Resample::kNone, false, "conv3_2"},
      {256, Resample::kNone, false, "conv3_3"},   {256, Resample::kNone, false, "conv3_4"},
      {512, Resample::kPool2, false, "conv4_1"},  {512, Resample::kNone, false, "conv4_2"},
      {512, Resample::kNone, false, "conv4_3"},   {512, Resample::kNone, false, "conv4_4"},
      {512, Resample::kPool2, false, "conv5_1"},  {512, Resample::kNone, false, "conv5_2"},
      {512, Resample::kNone, false, "conv5_3"},   {512, Resample::kNone, false, "conv5_4"},
  };
  if (with_fc) {
    // The table counts 19 deformable layers; the classifier becomes 3x3 convs on the pooled map.
    p.push_back({4096, Resample::kPool2, false, "fc6"});
    p.push_back({4096, Resample::kNone, false, "fc7"});
    p.push_back({1000, Resample::kNone, true, "fc8"});
  }
  return p;
}

std::vector<ConvPlan> segnet_plan() {
  return {
      {64, Resample::kNone, false, "enc1_1"},      {64, Resample::kNone, false, "enc1_2"},
      {128, Resample::kPool2, false, "enc2_1"},    {128, Resample::kNone, false, "enc2_2"},
      {256, Resample::kPool2, false, "enc3_1"},    {256, Resample::kNone, false, "enc3_2"},
      {512, Resample::kPool2, false, "enc4_1"},    {512, Resample::kNone, false, "enc4_2"},
      {512, Resample::kNone, false, "dec4_2"},     {256, Resample::kNone, false, "dec4_1"},
      {256, Resample::kUpsample2, false, "dec3_2"}, {128, Resample::kNone, false, "dec3_1"},
      {128, Resample::kUpsample2, false, "dec2_2"}, {64, Resample::kNone, false, "dec2_1"},
      {64, Resample::kUpsample2, false, "dec1_2"},  {12, Resample::kNone, true, "dec1_1"},
  };
}

std::size_t apply(Resample r, std::size_t extent) noexcept {
  switch (r) {
    case Resample::kPool2:
      return std::max<std::size_t>(1, extent / 2);
    case Resample::kUpsample2:
      return extent * 2;
    case Resample::kNone:
      break;
  }
  return extent;
}

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

NetworkSpec build(std::string name, const std::vector<ConvPlan>& plan, std::size_t in_h,
                  std::size_t in_w, std::size_t deformable, bool tiny, DcnVariant variant) {
  NetworkSpec net;
  net.name = std::move(name);
  net.in_channels = 3;
  net.in_height = tiny ? in_h / 4 / 8 * 8 : in_h;
  net.in_width = tiny ? in_w / 4 / 8 * 8 : in_w;
  std::size_t c = net.in_channels;
  std::size_t h = net.in_height;
  std::size_t w = net.in_width;
  const std::size_t first_deformable = plan.size() - std::min(deformable, plan.size());
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const ConvPlan& p = plan[k];
    LayerSpec l;
    l.name = p.name;
    l.resample = p.resample;
    h = apply(p.resample, h);
    w = apply(p.resample, w);
    l.in_channels = c;
    l.out_channels = tiny && !p.keep_width ? std::max<std::size_t>(1, p.out_channels / 8)
                                           : p.out_channels;
    l.in_height = h;
    l.in_width = w;
    if (k >= first_deformable) l.deform = variant;
    net.layers.push_back(std::move(l));
    c = net.layers.back().out_channels;
  }
  net.validate();
  return net;
}

}  // namespace

ConvLayerSpec LayerSpec::conv() const {
  ConvLayerSpec s;
  s.in_channels = in_channels;
  s.out_channels = out_channels;
  s.kernel = kernel;
  s.stride = stride;
  s.padding = padding;
  return s;
}

ConvLayerSpec LayerSpec::offset_conv() const {
  ConvLayerSpec s;
  s.in_channels = in_channels;
  s.out_channels = offset_channels(deform.value_or(DcnVariant::kWindow), kernel);
  s.kernel = kernel;
  if (deform == DcnVariant::kPlane) {
    s.stride = 1;
    s.padding = kernel / 2;
  } else {
    s.stride = stride;
    s.padding = padding;
  }
  return s;
}

std::size_t NetworkSpec::deformable_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(layers.begin(), layers.end(), [](const LayerSpec& l) { return l.deformable(); }));
}

void NetworkSpec::validate() const {
  std::size_t c = in_channels;
  std::size_t h = in_height;
  std::size_t w = in_width;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const LayerSpec& l = layers[k];
    const std::string where = "layer " + std::to_string(k) + " (" + l.name + ")";
    if (l.in_channels != c) {
      throw ConfigError(where + ": channel axis expects " + std::to_string(c) + ", has " +
                        std::to_string(l.in_channels));
    }
    if (l.in_height != apply(l.resample, h) || l.in_width != apply(l.resample, w)) {
      throw ConfigError(where + ": spatial axes do not chain from the previous layer");
    }
    if (l.kernel == 0 || l.stride == 0 || l.out_channels == 0) {
      throw ConfigError(where + ": kernel, stride and out_channels must be positive");
    }
    if (l.deform == DcnVariant::kPlane && l.kernel % 2 == 0) {
      throw ConfigError(where + ": the plane-sharing variant needs an odd kernel");
    }
    (void)l.window();
    c = l.out_channels;
    h = l.out_height();
    w = l.out_width();
  }
}

std::vector<std::string> list_benchmarks() {
  std::vector<std::string> out;
  for (const char* prefix : {"", "tiny-"}) {
    for (const char* net : {"VGG19", "SegNet"}) {
      for (const char* suffix : {"-3", "-8", "-F"}) out.push_back(std::string(prefix) + net + suffix);
    }
  }
  return out;
}

NetworkSpec load_benchmark(std::string_view name, DcnVariant variant) {
  std::string key = lower(name);
  bool tiny = false;
  if (key.rfind("tiny-", 0) == 0) {
    tiny = true;
    key = key.substr(5);
  }
  if (key.rfind("vgg-", 0) == 0) key = "vgg19-" + key.substr(4);
  const auto dash = key.rfind('-');
  if (dash == std::string::npos) throw ConfigError("unknown benchmark '" + std::string(name) + "'");
  const std::string base = key.substr(0, dash);
  const std::string suffix = key.substr(dash + 1);
  std::size_t deformable = 0;
  if (suffix == "3") {
    deformable = 3;
  } else if (suffix == "8") {
    deformable = 8;
  } else if (suffix == "f") {
    deformable = static_cast<std::size_t>(-1);
  } else {
    throw ConfigError("unknown benchmark '" + std::string(name) + "'");
  }
  std::string canonical = (tiny ? "tiny-" : "");
  if (base == "vgg19") {
    canonical += "VGG19-" + std::string(suffix == "f" ? "F" : suffix);
    return build(canonical, vgg19_plan(suffix == "f"), 224, 224, deformable, tiny, variant);
  }
  if (base == "segnet") {
    canonical += "SegNet-" + std::string(suffix == "f" ? "F" : suffix);
    return build(canonical, segnet_plan(), 360, 480, deformable, tiny, variant);
  }
  throw ConfigError("unknown benchmark '" + std::string(name) + "'");
}

}  // namespace dcnsim
