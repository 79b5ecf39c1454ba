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

#include "lavoce/core/error.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::dsp {

inline double peak_abs(const Waveform& w) {
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  return peak;
}

/// Divides by max |sample| so the output peak is exactly 1.
inline Waveform peak_normalize(const Waveform& w) {
  const double peak = peak_abs(w);
  if (!(peak > 0.0)) throw Error(Errc::kSilentSignal, "peak_normalize: signal is silent");
  Waveform out = w;
  if (peak == 1.0) return out;
  for (double& s : out.samples) s /= peak;
  return out;
}

}  // namespace lavoce::dsp
