// Copyright 2026 The pmimask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "pmimask/types.hpp"

namespace pmimask {

// Canonical key for an unordered token pair: smaller id in the high word.
constexpr std::uint64_t PairKey(TokenId a, TokenId b) noexcept {
  if (b < a) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}
constexpr TokenId PairFirst(std::uint64_t key) noexcept {
  return static_cast<TokenId>(key >> 32);
}
constexpr TokenId PairSecond(std::uint64_t key) noexcept {
  return static_cast<TokenId>(key & 0xffffffffULL);
}

// Open-addressing hash map from canonical pair keys to values. The all-ones
// key never occurs because it would need id 0xffffffff on both sides, which
// is rejected at vocabulary load.
template <typename Value>
class PairMap {
 public:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

  PairMap() { Rehash(16); }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  Value& operator[](std::uint64_t key) {
    if ((size_ + 1) * 2 > keys_.size()) Rehash(keys_.size() * 2);
    std::size_t slot = Slot(key);
    while (keys_[slot] != kEmpty) {
      if (keys_[slot] == key) return values_[slot];
      slot = (slot + 1) & mask_;
    }
    keys_[slot] = key;
    values_[slot] = Value{};
    ++size_;
    return values_[slot];
  }

  const Value* Find(std::uint64_t key) const noexcept {
    std::size_t slot = Slot(key);
    while (keys_[slot] != kEmpty) {
      if (keys_[slot] == key) return &values_[slot];
      slot = (slot + 1) & mask_;
    }
    return nullptr;
  }

  template <typename Fn>
  void ForEach(Fn&& fn) const {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (keys_[i] != kEmpty) fn(keys_[i], values_[i]);
    }
  }

  std::vector<std::pair<std::uint64_t, Value>> Sorted() const {
    std::vector<std::pair<std::uint64_t, Value>> out;
    out.reserve(size_);
    ForEach([&](std::uint64_t k, const Value& v) { out.emplace_back(k, v); });
    std::sort(out.begin(), out.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
  }

  void Reserve(std::size_t n) {
    std::size_t cap = keys_.size();
    while (n * 2 > cap) cap *= 2;
    if (cap != keys_.size()) Rehash(cap);
  }

 private:
  static std::uint64_t Mix(std::uint64_t x) noexcept {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
  }

  std::size_t Slot(std::uint64_t key) const noexcept { return Mix(key) & mask_; }

  void Rehash(std::size_t capacity) {
    std::vector<std::uint64_t> old_keys(capacity, kEmpty);
    std::vector<Value> old_values(capacity);
    old_keys.swap(keys_);
    old_values.swap(values_);
    mask_ = capacity - 1;
    for (std::size_t i = 0; i < old_keys.size(); ++i) {
      if (old_keys[i] == kEmpty) continue;
      std::size_t slot = Slot(old_keys[i]);
      while (keys_[slot] != kEmpty) slot = (slot + 1) & mask_;
      keys_[slot] = old_keys[i];
      values_[slot] = std::move(old_values[i]);
    }
  }

  std::vector<std::uint64_t> keys_;
  std::vector<Value> values_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

}  // namespace pmimask
