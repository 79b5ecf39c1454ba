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
#include <optional>
#include <random>

#include "lavoce/core/error.hpp"
#include "lavoce/core/random.hpp"
#include "lavoce/visual/video_clip.hpp"

namespace lavoce::visual {

struct AugmentSpec {
  bool crop = true;
  std::size_t crop_size = 88;
  bool hflip = true;
  double flip_prob = 0.5;
  std::optional<bool> force_flip;  ///< overrides the coin when set
  bool erase = true;
  double erase_min_area = 0.02;
  double erase_max_area = 0.33;
  double erase_min_aspect = 0.3;
  double erase_max_aspect = 3.33;
  bool time_mask = true;
  std::size_t max_mask_frames = 10;
};

struct EraseBox {
  std::size_t y = 0, x = 0, h = 0, w = 0;
  double area_fraction() const { return static_cast<double>(h * w) / static_cast<double>(kRoiSize * kRoiSize); }
};

/// What a seeded augmentation actually did.
struct AugmentRecord {
  std::size_t crop_y = 0, crop_x = 0;
  bool flipped = false;
  std::optional<EraseBox> erased;
  std::size_t mask_start = 0, mask_frames = 0;
};

struct Augmented {
  VideoClip clip;
  AugmentRecord record;
};

/// Bilinear resampling of one square frame (half-pixel centres).
inline std::vector<double> resize_bilinear(const std::vector<double>& src, std::size_t in, std::size_t out) {
  std::vector<double> dst(out * out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  auto coord = [&](std::size_t d, std::size_t& i0, std::size_t& i1, double& f) {
    const double s = std::clamp((static_cast<double>(d) + 0.5) * scale - 0.5, 0.0, static_cast<double>(in - 1));
    i0 = static_cast<std::size_t>(s);
    i1 = std::min(i0 + 1, in - 1);
    f = s - static_cast<double>(i0);
  };
  for (std::size_t y = 0; y < out; ++y) {
    std::size_t y0, y1;
    double fy;
    coord(y, y0, y1, fy);
    for (std::size_t x = 0; x < out; ++x) {
      std::size_t x0, x1;
      double fx;
      coord(x, x0, x1, fx);
      const double top = src[y0 * in + x0] * (1 - fx) + src[y0 * in + x1] * fx;
      const double bot = src[y1 * in + x0] * (1 - fx) + src[y1 * in + x1] * fx;
      dst[y * out + x] = top * (1 - fy) + bot * fy;
    }
  }
  return dst;
}

inline void hflip(VideoClip& clip) {
  for (std::size_t t = 0; t < clip.n_frames; ++t) {
    for (std::size_t y = 0; y < clip.height; ++y) {
      auto* row = &clip.at(t, y, 0);
      std::reverse(row, row + clip.width);
    }
  }
}

inline EraseBox draw_erase_box(const AugmentSpec& spec, Rng& rng) {
  const double total = static_cast<double>(kRoiSize * kRoiSize);
  std::uniform_real_distribution<double> area(spec.erase_min_area, spec.erase_max_area);
  std::uniform_real_distribution<double> log_aspect(std::log(spec.erase_min_aspect), std::log(spec.erase_max_aspect));
  EraseBox box;
  for (int attempt = 0;; ++attempt) {
    const double a = area(rng) * total;
    const double r = attempt < 100 ? std::exp(log_aspect(rng)) : 1.0;
    box.h = static_cast<std::size_t>(std::lround(std::sqrt(a * r)));
    box.w = static_cast<std::size_t>(std::lround(std::sqrt(a / r)));
    if (box.h < 1 || box.w < 1 || box.h > kRoiSize || box.w > kRoiSize) continue;
    const double frac = box.area_fraction();
    if (frac >= spec.erase_min_area && frac <= spec.erase_max_area) break;
  }
  box.y = std::uniform_int_distribution<std::size_t>(0, kRoiSize - box.h)(rng);
  box.x = std::uniform_int_distribution<std::size_t>(0, kRoiSize - box.w)(rng);
  return box;
}

/// Random crop (resized back to 96), horizontal flip, random erase and time
/// masking. One draw per clip: all frames share the crop, flip and box.
inline Augmented augment(const VideoClip& clip, const AugmentSpec& spec, std::uint64_t seed) {
  clip.validate();
  if (spec.crop_size == 0 || spec.crop_size > kRoiSize) {
    throw Error(Errc::kInvalidArgument, "crop size must be in 1..96");
  }
  Rng rng(seed);
  Augmented out{clip, {}};
  VideoClip& c = out.clip;
  AugmentRecord& rec = out.record;
  const std::size_t fs = c.frame_size();

  if (spec.crop) {
    const std::size_t cs = spec.crop_size;
    std::uniform_int_distribution<std::size_t> off(0, kRoiSize - cs);
    rec.crop_y = off(rng);
    rec.crop_x = off(rng);
    std::vector<double> patch(cs * cs);
    for (std::size_t t = 0; t < c.n_frames; ++t) {
      for (std::size_t y = 0; y < cs; ++y) {
        for (std::size_t x = 0; x < cs; ++x) patch[y * cs + x] = clip.at(t, rec.crop_y + y, rec.crop_x + x);
      }
      const auto back = resize_bilinear(patch, cs, kRoiSize);
      std::copy(back.begin(), back.end(), c.pixels.begin() + static_cast<std::ptrdiff_t>(t * fs));
    }
  }

  if (spec.hflip) {
    const bool coin = std::bernoulli_distribution(spec.flip_prob)(rng);
    rec.flipped = spec.force_flip.value_or(coin);
    if (rec.flipped) hflip(c);
  }

  if (spec.erase) {
    const EraseBox box = draw_erase_box(spec, rng);
    std::uniform_real_distribution<double> fill(0.0, 1.0);
    for (std::size_t t = 0; t < c.n_frames; ++t) {
      for (std::size_t y = box.y; y < box.y + box.h; ++y) {
        for (std::size_t x = box.x; x < box.x + box.w; ++x) c.at(t, y, x) = fill(rng);
      }
    }
    rec.erased = box;
  }

  if (spec.time_mask) {
    const std::size_t max_len = std::min(spec.max_mask_frames, c.n_frames);
    rec.mask_frames = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
    rec.mask_start = std::uniform_int_distribution<std::size_t>(0, c.n_frames - rec.mask_frames)(rng);
    if (rec.mask_frames > 0) {
      std::vector<double> mean(fs, 0.0);
      for (std::size_t t = 0; t < c.n_frames; ++t) {
        for (std::size_t i = 0; i < fs; ++i) mean[i] += c.pixels[t * fs + i];
      }
      for (double& m : mean) m /= static_cast<double>(c.n_frames);
      for (std::size_t t = rec.mask_start; t < rec.mask_start + rec.mask_frames; ++t) {
        std::copy(mean.begin(), mean.end(), c.pixels.begin() + static_cast<std::ptrdiff_t>(t * fs));
      }
    }
  }
  return out;
}

}  // namespace lavoce::visual
