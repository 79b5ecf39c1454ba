// Copyright 2026  The lavoce Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "lavoce/core/error.hpp"

namespace lavoce::io {

/// Append-only little-endian byte sink.
class ByteWriter {
 public:
  template <class U>
  void put(U value) {
    static_assert(std::is_arithmetic_v<U>);
    if constexpr (std::is_floating_point_v<U>) {
      using Bits = std::conditional_t<sizeof(U) == 4, std::uint32_t, std::uint64_t>;
      put(std::bit_cast<Bits>(value));
    } else {
      auto v = static_cast<std::make_unsigned_t<U>>(value);
      for (std::size_t i = 0; i < sizeof(U); ++i) {
        bytes_.push_back(static_cast<std::uint8_t>(v & 0xFFu));
        if constexpr (sizeof(U) > 1) v = static_cast<decltype(v)>(v >> 8);
      }
    }
  }

  void put_bytes(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Bounds-checked little-endian reader. Running past the end raises
/// `truncation_code` so each file format can report its own error kind.
class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, Errc truncation_code,
             std::string what)
      : bytes_(bytes), code_(truncation_code), what_(std::move(what)) {}

  template <class U>
  U get() {
    static_assert(std::is_arithmetic_v<U>);
    require(sizeof(U));
    if constexpr (std::is_floating_point_v<U>) {
      using Bits = std::conditional_t<sizeof(U) == 4, std::uint32_t, std::uint64_t>;
      return std::bit_cast<U>(get<Bits>());
    } else {
      std::make_unsigned_t<U> v = 0;
      for (std::size_t i = 0; i < sizeof(U); ++i) {
        v = static_cast<decltype(v)>(v | (static_cast<decltype(v)>(bytes_[pos_ + i]) << (8 * i)));
      }
      pos_ += sizeof(U);
      return static_cast<U>(v);
    }
  }

  std::string get_string(std::size_t n) {
    require(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void skip(std::size_t n) {
    require(n);
    pos_ += n;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void require(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(code_, what_ + ": truncated at byte " + std::to_string(pos_));
    }
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
  Errc code_;
  std::string what_;
};

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::kIo, "short write to " + path);
}

}  // namespace lavoce::io
