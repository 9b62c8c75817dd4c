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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace dcnsim {

/// Fixed-length bit vector: the dependency rows, on-chip status and pending-tile
/// sets of the scheduler. Bit i is tile i.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}
  BitVector(std::size_t size, std::initializer_list<std::size_t> set_bits) : BitVector(size) {
    for (std::size_t b : set_bits) set(b);
  }
  /// "0110" -> bits 1 and 2 set (leftmost character is bit 0).
  static BitVector from_string(std::string_view bits);

  std::size_t size() const noexcept { return size_; }

  bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void clear() noexcept {
    for (auto& w : words_) w = 0;
  }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool any() const noexcept {
    for (auto w : words_) {
      if (w) return true;
    }
    return false;
  }
  bool none() const noexcept { return !any(); }

  /// popcount(*this & other) without materialising the AND.
  std::size_t count_and(const BitVector& other) const noexcept {
    std::size_t n = 0;
    for (std::size_t k = 0; k < words_.size(); ++k) {
      n += static_cast<std::size_t>(std::popcount(words_[k] & other.words_[k]));
    }
    return n;
  }
  bool is_subset_of(const BitVector& other) const noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      if (words_[k] & ~other.words_[k]) return false;
    }
    return true;
  }

  BitVector& operator&=(const BitVector& o) noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  BitVector& operator|=(const BitVector& o) noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  /// this & ~o
  BitVector& and_not(const BitVector& o) noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
    return *this;
  }
  BitVector operator~() const {
    BitVector r = *this;
    for (auto& w : r.words_) w = ~w;
    r.trim();
    return r;
  }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
  friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
  bool operator==(const BitVector&) const = default;

  /// Ascending indices of set bits.
  std::vector<std::size_t> ones() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if (test(i)) s[i] = '1';
    }
    return s;
  }

 private:
  void trim() noexcept {
    if (size_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

inline BitVector BitVector::from_string(std::string_view bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') v.set(i);
  }
  return v;
}

}  // namespace dcnsim
