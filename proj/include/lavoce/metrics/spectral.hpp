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
#include <numbers>

#include "lavoce/core/error.hpp"
#include "lavoce/dsp/mel.hpp"
#include "lavoce/dsp/stft.hpp"

namespace lavoce::metrics {

using dsp::AudioParams;
using dsp::Waveform;

namespace detail {

inline void require_same_rate(const Waveform& a, const Waveform& b, const char* what) {
  if (a.sample_rate != b.sample_rate) {
    throw Error(Errc::kRateMismatch, std::string(what) + ": sample rates differ (" + std::to_string(a.sample_rate) +
                                         " vs " + std::to_string(b.sample_rate) + ")");
  }
}

inline AudioParams params_for(const Waveform& w) {
  AudioParams p;
  p.sample_rate = w.sample_rate;
  p.f_max = std::min(p.f_max, w.sample_rate / 2.0);
  return p;
}

}  // namespace detail

inline constexpr std::size_t kMcdCoefficients = 13;

/// Frame-aligned mel cepstral distance over c1..c13 of the orthonormal
/// DCT-II of log-mel frames.
inline double mcd(const Waveform& ref, const Waveform& deg) {
  dsp::require_nonempty(ref, "mcd");
  dsp::require_nonempty(deg, "mcd");
  detail::require_same_rate(ref, deg, "mcd");
  const AudioParams p = detail::params_for(ref);
  const auto a = dsp::log_mel(ref, p);
  const auto b = dsp::log_mel(deg, p);
  const std::size_t frames = std::min(a.n_frames, b.n_frames);
  const std::size_t m = p.n_mels;
  const std::size_t dims = std::min(kMcdCoefficients, m - 1);

  std::vector<double> basis(dims * m);
  for (std::size_t d = 1; d <= dims; ++d) {
    for (std::size_t k = 0; k < m; ++k) {
      basis[(d - 1) * m + k] = std::sqrt(2.0 / static_cast<double>(m)) *
                               std::cos(std::numbers::pi * static_cast<double>(d) * (static_cast<double>(k) + 0.5) /
                                        static_cast<double>(m));
    }
  }
  const double scale = 10.0 / std::numbers::ln10 * std::sqrt(2.0);
  double total = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    double sq = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      double c = 0.0;
      for (std::size_t k = 0; k < m; ++k) c += basis[d * m + k] * (a.at(t, k) - b.at(t, k));
      sq += c * c;
    }
    total += scale * std::sqrt(sq);
  }
  return total / static_cast<double>(frames);
}

/// Mean squared difference of STFT magnitudes over the common frames.
inline double spec_mse(const Waveform& ref, const Waveform& deg) {
  dsp::require_nonempty(ref, "spec_mse");
  dsp::require_nonempty(deg, "spec_mse");
  detail::require_same_rate(ref, deg, "spec_mse");
  const AudioParams p = detail::params_for(ref);
  const auto a = dsp::magnitudes(dsp::stft(ref, p));
  const auto b = dsp::magnitudes(dsp::stft(deg, p));
  const std::size_t frames = std::min(a.n_frames, b.n_frames);
  double acc = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < a.n_bins; ++k) {
      const double d = a.at(t, k) - b.at(t, k);
      acc += d * d;
    }
  }
  return acc / static_cast<double>(frames * a.n_bins);
}

}  // namespace lavoce::metrics
