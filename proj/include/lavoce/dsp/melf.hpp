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

// MELF container: "MELF", u32 frame count, u32 band count, then row-major
// little-endian f32 values.

#include <cstdint>
#include <string>
#include <vector>

#include "lavoce/core/binary_io.hpp"
#include "lavoce/core/error.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::dsp {

inline std::vector<std::uint8_t> encode_melf(const MelSpectrogram& mel) {
  io::ByteWriter out;
  out.put_bytes("MELF");
  out.put<std::uint32_t>(static_cast<std::uint32_t>(mel.n_frames));
  out.put<std::uint32_t>(static_cast<std::uint32_t>(mel.n_mels));
  for (double v : mel.data) out.put<float>(static_cast<float>(v));
  return std::move(out.bytes());
}

/// The file carries no analysis parameters; `params` is attached as given
/// and must agree with the stored band count.
inline MelSpectrogram decode_melf(const std::vector<std::uint8_t>& bytes, const AudioParams& params = {},
                                  const std::string& name = "melf") {
  io::ByteReader r(bytes, Errc::kBadMagic, name);
  if (r.get_string(4) != "MELF") throw Error(Errc::kBadMagic, name + ": not a MELF file");
  MelSpectrogram mel;
  mel.n_frames = r.get<std::uint32_t>();
  mel.n_mels = r.get<std::uint32_t>();
  mel.params = params;
  if (mel.n_mels != params.n_mels) {
    throw Error(Errc::kShapeMismatch, name + ": " + std::to_string(mel.n_mels) + " bands, expected " +
                                          std::to_string(params.n_mels));
  }
  r.require(mel.n_frames * mel.n_mels * 4);
  mel.data.resize(mel.n_frames * mel.n_mels);
  for (auto& v : mel.data) v = static_cast<double>(r.get<float>());
  return mel;
}

inline void save_melf(const std::string& path, const MelSpectrogram& mel) { io::write_file(path, encode_melf(mel)); }

inline MelSpectrogram load_melf(const std::string& path, const AudioParams& params = {}) {
  return decode_melf(io::read_file(path), params, path);
}

}  // namespace lavoce::dsp
