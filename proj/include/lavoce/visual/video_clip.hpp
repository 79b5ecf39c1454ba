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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lavoce/core/binary_io.hpp"
#include "lavoce/core/error.hpp"

namespace lavoce::visual {

inline constexpr std::size_t kRoiSize = 96;
inline constexpr double kDefaultVideoFps = 25.0;

/// Grayscale mouth-ROI frames, frame-major, row-major, values in [0, 1].
struct VideoClip {
  std::size_t n_frames = 0;
  std::size_t height = kRoiSize;
  std::size_t width = kRoiSize;
  double fps = kDefaultVideoFps;
  std::vector<double> pixels;

  std::size_t frame_size() const { return height * width; }
  double& at(std::size_t t, std::size_t y, std::size_t x) { return pixels[(t * height + y) * width + x]; }
  double at(std::size_t t, std::size_t y, std::size_t x) const { return pixels[(t * height + y) * width + x]; }
  double duration() const { return static_cast<double>(n_frames) / fps; }

  static VideoClip zeros(std::size_t frames, double fps = kDefaultVideoFps) {
    VideoClip c;
    c.n_frames = frames;
    c.fps = fps;
    c.pixels.assign(frames * kRoiSize * kRoiSize, 0.0);
    return c;
  }

  void validate() const {
    if (height != kRoiSize || width != kRoiSize) {
      throw Error(Errc::kWrongSpatialSize, "ROI must be 96x96, got " + std::to_string(width) + "x" +
                                               std::to_string(height));
    }
    if (n_frames < 1 || !(fps > 0.0) || pixels.size() != n_frames * frame_size()) {
      throw Error(Errc::kShapeMismatch, "video clip needs >= 1 frame, fps > 0 and T*96*96 pixels");
    }
  }
};

inline std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0));
}

// VROI: "VROI", u32 frames, u16 width, u16 height, u16 fps*100, frame-major u8.
inline std::vector<std::uint8_t> encode_vroi(const VideoClip& clip) {
  clip.validate();
  io::ByteWriter w;
  w.put_bytes("VROI");
  w.put(static_cast<std::uint32_t>(clip.n_frames));
  w.put(static_cast<std::uint16_t>(clip.width));
  w.put(static_cast<std::uint16_t>(clip.height));
  w.put(static_cast<std::uint16_t>(std::lround(clip.fps * 100.0)));
  auto& bytes = w.bytes();
  bytes.reserve(bytes.size() + clip.pixels.size());
  for (double v : clip.pixels) bytes.push_back(quantize(v));
  return std::move(w.bytes());
}

inline VideoClip decode_vroi(const std::vector<std::uint8_t>& bytes, const std::string& name = "VROI") {
  io::ByteReader r(bytes, Errc::kBadHeader, name);
  if (r.get_string(4) != "VROI") throw Error(Errc::kBadHeader, name + ": missing VROI magic");
  VideoClip c;
  c.n_frames = r.get<std::uint32_t>();
  c.width = r.get<std::uint16_t>();
  c.height = r.get<std::uint16_t>();
  const auto fps100 = r.get<std::uint16_t>();
  if (c.n_frames == 0 || fps100 == 0) throw Error(Errc::kBadHeader, name + ": zero frames or fps");
  c.fps = fps100 / 100.0;
  if (c.width != kRoiSize || c.height != kRoiSize) c.validate();
  const std::size_t n = c.n_frames * c.frame_size();
  if (r.remaining() != n) throw Error(Errc::kBadHeader, name + ": payload size does not match header");
  c.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.pixels[i] = bytes[r.position() + i] / 255.0;
  return c;
}

inline void save_roi(const std::string& path, const VideoClip& clip) { io::write_file(path, encode_vroi(clip)); }

namespace detail {

struct PgmImage {
  std::size_t width = 0, height = 0;
  std::vector<double> pixels;
};

inline PgmImage decode_pgm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&] {
    skip_space();
    std::size_t v = 0, digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      ++digits;
    }
    if (digits == 0) throw Error(Errc::kBadHeader, name + ": malformed PGM header");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw Error(Errc::kBadHeader, name + ": not a P5/P2 PGM");
  }
  const bool binary = bytes[1] == '5';
  pos = 2;
  PgmImage img;
  img.width = number();
  img.height = number();
  const std::size_t maxval = number();
  if (maxval == 0 || maxval > 255) throw Error(Errc::kBadHeader, name + ": only 8-bit PGM supported");
  const std::size_t n = img.width * img.height;
  img.pixels.resize(n);
  if (binary) {
    ++pos;  // single whitespace after maxval
    if (bytes.size() - std::min(pos, bytes.size()) < n) throw Error(Errc::kBadHeader, name + ": truncated PGM");
    for (std::size_t i = 0; i < n; ++i) img.pixels[i] = static_cast<double>(bytes[pos + i]) / static_cast<double>(maxval);
  } else {
    for (std::size_t i = 0; i < n; ++i) img.pixels[i] = std::min(1.0, static_cast<double>(number()) / static_cast<double>(maxval));
  }
  return img;
}

}  // namespace detail

/// A directory of 8-bit PGM frames in lexicographic order.
inline VideoClip load_pgm_dir(const std::filesystem::path& dir, double fps) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(Errc::kBadHeader, dir.string() + ": no .pgm frames");
  if (!(fps > 0.0)) throw Error(Errc::kInvalidArgument, "fps must be positive");
  VideoClip c;
  c.n_frames = files.size();
  c.fps = fps;
  for (const auto& f : files) {
    const auto img = detail::decode_pgm(io::read_file(f.string()), f.string());
    if (img.width != kRoiSize || img.height != kRoiSize) {
      throw Error(Errc::kWrongSpatialSize, f.string() + ": " + std::to_string(img.width) + "x" +
                                               std::to_string(img.height) + " frame, expected 96x96");
    }
    c.pixels.insert(c.pixels.end(), img.pixels.begin(), img.pixels.end());
  }
  return c;
}

/// Loads a VROI file, or a PGM frame directory at `fps`.
inline VideoClip load_roi(const std::filesystem::path& path, double dir_fps = kDefaultVideoFps) {
  if (std::filesystem::is_directory(path)) return load_pgm_dir(path, dir_fps);
  return decode_vroi(io::read_file(path.string()), path.string());
}

}  // namespace lavoce::visual
