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

#include <filesystem>
#include <iosfwd>

#include "dcnsim/tensor.hpp"

namespace dcnsim {

/// Raw tensor file: "DCNT", u32 C, u32 H, u32 W (little-endian), then C*H*W
/// little-endian float32 values in channel-major order.
inline constexpr char kTensorMagic[4] = {'D', 'C', 'N', 'T'};
inline constexpr std::size_t kTensorHeaderBytes = 16;

void write_tensor(std::ostream& out, const Tensor3D& t);
void write_tensor(const std::filesystem::path& path, const Tensor3D& t);

/// Throws ConfigError on bad magic, truncated data or trailing bytes.
Tensor3D read_tensor(std::istream& in);
Tensor3D read_tensor(const std::filesystem::path& path);

}  // namespace dcnsim
