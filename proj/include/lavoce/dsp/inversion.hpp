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

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "lavoce/core/error.hpp"
#include "lavoce/dsp/mel.hpp"
#include "lavoce/dsp/normalize.hpp"
#include "lavoce/dsp/stft.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::dsp {

inline constexpr std::size_t kDefaultGriffinLimIters = 32;

struct GriffinLimResult {
  Waveform waveform;
  /// Spectral convergence ||A x_k| - M| / |M| before each update and after
  /// the last one (iters + 1 entries).
  std::vector<double> convergence;
};

namespace detail {

// Squared norm of a half spectrum counted as the full two-sided spectrum:
// interior bins appear twice, DC and Nyquist once.
inline double bin_weight(std::size_t k, std::size_t n_bins) {
  return (k == 0 || k + 1 == n_bins) ? 1.0 : 2.0;
}

}  // namespace detail

/// Griffin-Lim on target magnitudes. Iterates in the uncropped frame domain
/// where overlap-add is the exact least-squares inverse of framing, which
/// makes the projection pair (and the convergence trace) monotone. Zero
/// initial phase, no momentum. Output is cropped like `istft` and
/// peak-normalized.
inline GriffinLimResult griffin_lim_magnitudes(const MagnitudeFrames& target, const AudioParams& p,
                                               std::size_t iters = kDefaultGriffinLimIters) {
  p.validate();
  if (iters < 1) throw Error(Errc::kInvalidArgument, "griffin_lim: iters must be >= 1");
  if (target.n_frames < 2) {
    throw Error(Errc::kMinFrames, "griffin_lim needs at least 2 frames, got " + std::to_string(target.n_frames));
  }
  if (target.n_bins != p.n_bins() || target.data.size() != target.n_frames * target.n_bins) {
    throw Error(Errc::kShapeMismatch, "griffin_lim: magnitude shape does not match params");
  }
  const std::size_t frames = target.n_frames, bins = target.n_bins;

  double target_norm2 = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < bins; ++k) target_norm2 += detail::bin_weight(k, bins) * target.at(t, k) * target.at(t, k);
  }
  const double target_norm = std::sqrt(target_norm2);

  ComplexSpectrogram estimate;
  estimate.params = p;
  estimate.n_frames = frames;
  estimate.n_bins = bins;
  estimate.data.resize(target.data.size());
  for (std::size_t i = 0; i < target.data.size(); ++i) estimate.data[i] = {target.data[i], 0.0};

  GriffinLimResult result;
  std::vector<double> signal;
  std::vector<double> re, im;
  auto project = [&]() {
    signal = overlap_add(estimate);
    analyze_frames<double>(signal, frames, p, re, im);
    double dist2 = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t k = 0; k < bins; ++k) {
        const std::size_t i = t * bins + k;
        const double mag = std::hypot(re[i], im[i]);
        const double diff = mag - target.data[i];
        dist2 += detail::bin_weight(k, bins) * diff * diff;
      }
    }
    result.convergence.push_back(target_norm > 0.0 ? std::sqrt(dist2) / target_norm : 0.0);
  };

  for (std::size_t it = 0; it < iters; ++it) {
    project();
    for (std::size_t i = 0; i < estimate.data.size(); ++i) {
      const double mag = std::hypot(re[i], im[i]);
      estimate.data[i] = mag > 0.0 ? std::complex<double>(re[i], im[i]) * (target.data[i] / mag)
                                   : std::complex<double>(target.data[i], 0.0);
    }
  }
  project();

  const std::size_t pad = center_pad(p);
  Waveform w;
  w.sample_rate = p.sample_rate;
  w.samples.assign(signal.begin() + static_cast<std::ptrdiff_t>(pad),
                   signal.begin() + static_cast<std::ptrdiff_t>(pad + (frames - 1) * p.hop));
  result.waveform = peak_normalize(w);
  return result;
}

inline GriffinLimResult griffin_lim_traced(const MelSpectrogram& mel, std::size_t iters = kDefaultGriffinLimIters) {
  if (mel.n_frames < 2) {
    throw Error(Errc::kMinFrames, "griffin_lim needs at least 2 frames, got " + std::to_string(mel.n_frames));
  }
  return griffin_lim_magnitudes(mel_to_linear(mel), mel.params, iters);
}

inline Waveform griffin_lim(const MelSpectrogram& mel, std::size_t iters = kDefaultGriffinLimIters) {
  return griffin_lim_traced(mel, iters).waveform;
}

/// iSTFT of the given magnitudes with the phase of `noisy`. Frame counts may
/// differ by one (the longer is truncated); larger gaps are rejected.
inline Waveform phase_invert(const MagnitudeFrames& mags, const Waveform& noisy, const AudioParams& p) {
  const auto s = stft(noisy, p);
  if (mags.n_bins != s.n_bins) throw Error(Errc::kShapeMismatch, "phase_invert: bin count mismatch");
  const std::size_t a = mags.n_frames, b = s.n_frames;
  if ((a > b ? a - b : b - a) > 1) {
    throw Error(Errc::kShapeMismatch, "phase_invert: predicted " + std::to_string(a) +
                                          " frames vs noisy " + std::to_string(b));
  }
  ComplexSpectrogram x;
  x.params = p;
  x.n_frames = std::min(a, b);
  x.n_bins = s.n_bins;
  x.data.resize(x.n_frames * x.n_bins);
  for (std::size_t t = 0; t < x.n_frames; ++t) {
    for (std::size_t k = 0; k < x.n_bins; ++k) {
      const auto z = s.at(t, k);
      const double mag = std::abs(z);
      x.at(t, k) = mag > 0.0 ? z * (mags.at(t, k) / mag) : std::complex<double>(mags.at(t, k), 0.0);
    }
  }
  return istft(x);
}

inline Waveform noisy_phase_invert(const MelSpectrogram& pred_mel, const Waveform& noisy) {
  return phase_invert(mel_to_linear(pred_mel), noisy, pred_mel.params);
}

}  // namespace lavoce::dsp
