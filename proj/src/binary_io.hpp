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
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>

#include "pmimask/error.hpp"

namespace pmimask::internal {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian targets are not supported");

template <typename T>
T ToLittle(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }

  void Magic(std::string_view magic) { out_.write(magic.data(), 4); }

  template <typename T>
  void Put(T v) {
    static_assert(std::is_arithmetic_v<T>);
    const T le = ToLittle(v);
    out_.write(reinterpret_cast<const char*>(&le), sizeof le);
  }

  void Close() {
    out_.flush();
    if (!out_) throw Error(ErrorCode::kIoError, "write failed for " + path_.string());
    out_.close();
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }

  void ExpectMagic(std::string_view magic) {
    char buf[4] = {};
    in_.read(buf, 4);
    if (!in_ || std::string_view(buf, 4) != magic) {
      throw Error(ErrorCode::kFormatError,
                  path_.string() + ": bad magic, expected '" + std::string(magic) + "'");
    }
  }

  template <typename T>
  T Get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw Error(ErrorCode::kFormatError, path_.string() + ": truncated file");
    return ToLittle(v);
  }

  void ExpectEnd() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw Error(ErrorCode::kFormatError, path_.string() + ": trailing bytes");
    }
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace pmimask::internal
