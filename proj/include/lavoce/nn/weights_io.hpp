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

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "lavoce/core/binary_io.hpp"
#include "lavoce/core/error.hpp"
#include "lavoce/nn/tensor.hpp"

namespace lavoce::nn {

// LVWT: "LVWT", u32 count, then per tensor u16 name length, name, u8 rank,
// u32 dims, little-endian f32 data.
inline std::vector<std::uint8_t> encode_lvwt(const TensorBundle& b) {
  io::ByteWriter w;
  w.put_bytes("LVWT");
  w.put(static_cast<std::uint32_t>(b.size()));
  for (const auto& [name, t] : b) {
    if (name.size() > 0xFFFF || t.shape.size() > 0xFF) throw Error(Errc::kInvalidArgument, "tensor '" + name + "' not encodable");
    w.put(static_cast<std::uint16_t>(name.size()));
    w.put_bytes(name);
    w.put(static_cast<std::uint8_t>(t.shape.size()));
    for (std::size_t d : t.shape) w.put(static_cast<std::uint32_t>(d));
    for (double v : t.data) w.put(static_cast<float>(v));
  }
  return std::move(w.bytes());
}

inline TensorBundle decode_lvwt(const std::vector<std::uint8_t>& bytes, const std::string& name = "LVWT") {
  io::ByteReader r(bytes, Errc::kBadMagic, name);
  if (bytes.size() < 4 || r.get_string(4) != "LVWT") throw Error(Errc::kBadMagic, name + ": missing LVWT magic");
  const auto count = r.get<std::uint32_t>();
  TensorBundle b;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint16_t>();
    std::string tname = r.get_string(len);
    const auto rank = r.get<std::uint8_t>();
    Shape shape(rank);
    for (auto& d : shape) d = r.get<std::uint32_t>();
    const std::size_t n = element_count(shape);
    r.require(4 * n);
    std::vector<double> data(n);
    for (auto& v : data) v = static_cast<double>(r.get<float>());
    b.add(tname, Tensor(std::move(shape), std::move(data)));
  }
  if (r.remaining() != 0) throw Error(Errc::kBadMagic, name + ": trailing bytes after last tensor");
  return b;
}

inline std::string sidecar_path(const std::string& weights_path) { return weights_path + ".json"; }

/// Writes the bundle and a JSON sidecar holding the model kind and config.
inline void save_weights(const std::string& path, const TensorBundle& b, const nlohmann::json& sidecar) {
  io::write_file(path, encode_lvwt(b));
  std::ofstream out(sidecar_path(path));
  if (!out) throw Error(Errc::kIo, "cannot write " + sidecar_path(path));
  out << sidecar.dump(2) << '\n';
}

inline TensorBundle load_weights(const std::string& path) { return decode_lvwt(io::read_file(path), path); }

inline nlohmann::json load_sidecar(const std::string& weights_path) {
  std::ifstream in(sidecar_path(weights_path));
  if (!in) throw Error(Errc::kIo, "missing config sidecar " + sidecar_path(weights_path));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseFailure, sidecar_path(weights_path) + ": " + e.what());
  }
}

}  // namespace lavoce::nn
