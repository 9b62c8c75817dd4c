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

#include "dcnsim/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "dcnsim/errors.hpp"

namespace dcnsim {
namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                     static_cast<char>((v >> 16) & 0xff),
                                     static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes.data(), bytes.size());
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t checked_u32(std::size_t v, const char* axis) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError(std::string("tensor ") + axis + " does not fit in u32");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_tensor(std::ostream& out, const Tensor3D& t) {
  out.write(kTensorMagic, 4);
  put_u32(out, checked_u32(t.channels, "C"));
  put_u32(out, checked_u32(t.height, "H"));
  put_u32(out, checked_u32(t.width, "W"));
  for (double v : t.data) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!out) throw ConfigError("tensor write failed");
}

void write_tensor(const std::filesystem::path& path, const Tensor3D& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  write_tensor(out, t);
}

Tensor3D read_tensor(std::istream& in) {
  std::array<unsigned char, kTensorHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    throw ConfigError("tensor file: truncated header");
  }
  if (std::memcmp(header.data(), kTensorMagic, 4) != 0) {
    throw ConfigError("tensor file: bad magic (expected DCNT)");
  }
  const std::size_t c = get_u32(header.data() + 4);
  const std::size_t h = get_u32(header.data() + 8);
  const std::size_t w = get_u32(header.data() + 12);
  const std::size_t n = c * h * w;

  std::vector<unsigned char> raw(n * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw ConfigError("tensor file: expected " + std::to_string(n) + " float32 values");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ConfigError("tensor file: trailing bytes after payload");
  }
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = std::bit_cast<float>(get_u32(raw.data() + 4 * k));
  }
  return Tensor3D(c, h, w, std::move(values));
}

Tensor3D read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_tensor(in);
}

}  // namespace dcnsim
