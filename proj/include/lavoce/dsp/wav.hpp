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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lavoce/core/binary_io.hpp"
#include "lavoce/core/error.hpp"
#include "lavoce/dsp/resample.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::dsp {

enum class WavEncoding { kPcm16, kFloat32 };

namespace detail {

inline constexpr std::uint16_t kWaveFormatPcm = 1;
inline constexpr std::uint16_t kWaveFormatFloat = 3;
inline constexpr std::uint16_t kWaveFormatExtensible = 0xFFFE;

}  // namespace detail

/// Parses a mono RIFF/WAVE file (16-bit PCM or 32-bit float) at its native
/// rate.
inline Waveform decode_wav(const std::vector<std::uint8_t>& bytes, const std::string& name = "wav") {
  io::ByteReader r(bytes, Errc::kBadHeader, name);
  if (r.get_string(4) != "RIFF") throw Error(Errc::kBadHeader, name + ": missing RIFF tag");
  r.get<std::uint32_t>();
  if (r.get_string(4) != "WAVE") throw Error(Errc::kBadHeader, name + ": missing WAVE tag");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (r.remaining() >= 8) {
    const std::string id = r.get_string(4);
    const auto size = r.get<std::uint32_t>();
    if (id == "fmt ") {
      r.require(size);
      const std::size_t start = r.position();
      format = r.get<std::uint16_t>();
      channels = r.get<std::uint16_t>();
      rate = r.get<std::uint32_t>();
      r.get<std::uint32_t>();  // byte rate
      r.get<std::uint16_t>();  // block align
      bits = r.get<std::uint16_t>();
      if (format == detail::kWaveFormatExtensible && size >= 26) {
        r.get<std::uint16_t>();  // cbSize
        r.get<std::uint16_t>();  // valid bits
        r.get<std::uint32_t>();  // channel mask
        format = r.get<std::uint16_t>();
      }
      r.skip(size - (r.position() - start));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error(Errc::kBadHeader, name + ": data chunk before fmt");
      if (channels != 1) throw Error(Errc::kBadHeader, name + ": only mono audio is supported");
      if (rate == 0) throw Error(Errc::kBadHeader, name + ": zero sample rate");
      Waveform w;
      w.sample_rate = rate;
      if (format == detail::kWaveFormatPcm && bits == 16) {
        const std::size_t n = std::min<std::size_t>(size, r.remaining()) / 2;
        w.samples.resize(n);
        for (auto& s : w.samples) s = static_cast<double>(r.get<std::int16_t>()) / 32768.0;
      } else if (format == detail::kWaveFormatFloat && bits == 32) {
        const std::size_t n = std::min<std::size_t>(size, r.remaining()) / 4;
        w.samples.resize(n);
        for (auto& s : w.samples) s = static_cast<double>(r.get<float>());
      } else {
        throw Error(Errc::kBadHeader, name + ": unsupported encoding (format " + std::to_string(format) +
                                          ", " + std::to_string(bits) + " bits)");
      }
      return w;
    } else {
      r.skip(std::min<std::size_t>(size + (size & 1u), r.remaining()));
    }
  }
  throw Error(Errc::kBadHeader, name + ": no data chunk");
}

inline std::vector<std::uint8_t> encode_wav(const Waveform& w, WavEncoding enc) {
  const bool pcm = enc == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const auto rate = static_cast<std::uint32_t>(std::lround(w.sample_rate));
  const auto data_bytes = static_cast<std::uint32_t>(w.size() * bits / 8);
  io::ByteWriter out;
  out.put_bytes("RIFF");
  out.put<std::uint32_t>(36 + data_bytes);
  out.put_bytes("WAVE");
  out.put_bytes("fmt ");
  out.put<std::uint32_t>(16);
  out.put<std::uint16_t>(pcm ? detail::kWaveFormatPcm : detail::kWaveFormatFloat);
  out.put<std::uint16_t>(1);
  out.put<std::uint32_t>(rate);
  out.put<std::uint32_t>(rate * bits / 8);
  out.put<std::uint16_t>(bits / 8);
  out.put<std::uint16_t>(bits);
  out.put_bytes("data");
  out.put<std::uint32_t>(data_bytes);
  for (double s : w.samples) {
    if (pcm) {
      const long q = std::lround(s * 32768.0);
      out.put<std::int16_t>(static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L)));
    } else {
      out.put<float>(static_cast<float>(s));
    }
  }
  return std::move(out.bytes());
}

/// Reads a WAV file and resamples it to `target_rate` (0 keeps the native rate).
inline Waveform load_wav(const std::string& path, double target_rate = kDefaultSampleRate) {
  Waveform w = decode_wav(io::read_file(path), path);
  if (target_rate > 0 && w.sample_rate != target_rate) w = resample(w, target_rate);
  return w;
}

inline void save_wav(const std::string& path, const Waveform& w, WavEncoding enc = WavEncoding::kFloat32) {
  io::write_file(path, encode_wav(w, enc));
}

}  // namespace lavoce::dsp
