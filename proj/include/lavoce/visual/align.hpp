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
#include <cstddef>
#include <vector>

#include "lavoce/core/error.hpp"

namespace lavoce::visual {

/// Nearest video frame for every audio frame: floor(j * vf / af + 0.5),
/// clamped to the last video frame.
inline std::vector<std::size_t> align_indices(std::size_t t_audio, std::size_t t_video, double audio_fps = 62.5,
                                              double video_fps = 25.0) {
  if (t_audio < 1 || t_video < 1 || !(audio_fps > 0.0) || !(video_fps > 0.0)) {
    throw Error(Errc::kInvalidArgument, "align_indices: counts and rates must be positive");
  }
  std::vector<std::size_t> idx(t_audio);
  const double ratio = video_fps / audio_fps;
  for (std::size_t j = 0; j < t_audio; ++j) {
    const auto v = static_cast<std::size_t>(std::floor(static_cast<double>(j) * ratio + 0.5));
    idx[j] = std::min(v, t_video - 1);
  }
  return idx;
}

}  // namespace lavoce::visual
