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
#include <numbers>
#include <span>
#include <vector>

#include "lavoce/core/dual.hpp"
#include "lavoce/core/error.hpp"
#include "lavoce/dsp/fft.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::dsp {

/// Periodic Hann of length win_size, zero-padded to fft_size and centered.
inline std::vector<double> analysis_window(const AudioParams& p) {
  std::vector<double> w(p.fft_size, 0.0);
  const std::size_t offset = (p.fft_size - p.win_size) / 2;
  for (std::size_t n = 0; n < p.win_size; ++n) {
    w[offset + n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                         static_cast<double>(p.win_size));
  }
  return w;
}

inline std::size_t center_pad(const AudioParams& p) { return p.fft_size / 2; }

inline std::size_t stft_frame_count(std::size_t n_samples, const AudioParams& p) {
  return 1 + n_samples / p.hop;
}

/// Mirror extension without edge repetition (numpy "reflect"); folds
/// repeatedly when the pad exceeds the signal length.
template <class T>
std::vector<T> reflect_pad(std::span<const T> x, std::size_t left, std::size_t right) {
  const auto n = static_cast<long long>(x.size());
  std::vector<T> out(x.size() + left + right);
  const long long period = 2 * (n - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    long long j = static_cast<long long>(i) - static_cast<long long>(left);
    if (n == 1) {
      j = 0;
    } else {
      j %= period;
      if (j < 0) j += period;
      if (j >= n) j = period - j;
    }
    out[i] = x[static_cast<std::size_t>(j)];
  }
  return out;
}

/// Windowed FFT of frames taken every hop from an already padded signal.
/// Output is split real/imag, frame-major, n_bins per frame.
template <class T>
void analyze_frames(std::span<const T> padded, std::size_t n_frames, const AudioParams& p,
                    std::vector<T>& re_out, std::vector<T>& im_out) {
  const std::size_t n = p.fft_size;
  const std::size_t bins = p.n_bins();
  const auto window = analysis_window(p);
  const FftPlan plan(n);
  re_out.assign(n_frames * bins, T(0.0));
  im_out.assign(n_frames * bins, T(0.0));
  std::vector<T> re(n), im(n);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::size_t start = t * p.hop;
    for (std::size_t i = 0; i < n; ++i) {
      re[i] = padded[start + i] * window[i];
      im[i] = T(0.0);
    }
    plan.transform(re.data(), im.data(), false);
    for (std::size_t k = 0; k < bins; ++k) {
      re_out[t * bins + k] = re[k];
      im_out[t * bins + k] = im[k];
    }
  }
}

/// Centered STFT: reflection pad of fft_size/2 on each side (equal to
/// win_size/2 for the canonical configuration), T = 1 + floor(N / hop).
inline ComplexSpectrogram stft(const Waveform& w, const AudioParams& p) {
  require_nonempty(w, "stft");
  require_finite(w, "stft");
  p.validate();
  const std::size_t pad = center_pad(p);
  const auto padded = reflect_pad<double>(w.samples, pad, pad);
  ComplexSpectrogram s;
  s.params = p;
  s.n_frames = stft_frame_count(w.size(), p);
  s.n_bins = p.n_bins();
  std::vector<double> re, im;
  analyze_frames<double>(padded, s.n_frames, p, re, im);
  s.data.resize(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) s.data[i] = {re[i], im[i]};
  return s;
}

/// Least-squares overlap-add in the padded domain: each frame is inverse
/// transformed, multiplied by the synthesis window and the sum is divided by
/// the accumulated squared window. Output length (T-1)*hop + fft_size.
inline std::vector<double> overlap_add(const ComplexSpectrogram& s) {
  const AudioParams& p = s.params;
  const std::size_t n = p.fft_size;
  const std::size_t bins = p.n_bins();
  if (s.n_bins != bins || s.data.size() != s.n_frames * bins) {
    throw Error(Errc::kShapeMismatch, "spectrogram shape does not match its params");
  }
  const auto window = analysis_window(p);
  const FftPlan plan(n);
  const std::size_t len = (s.n_frames - 1) * p.hop + n;
  std::vector<double> acc(len, 0.0), wsum(len, 0.0);
  std::vector<double> re(n), im(n);
  for (std::size_t t = 0; t < s.n_frames; ++t) {
    for (std::size_t k = 0; k < bins; ++k) {
      re[k] = s.at(t, k).real();
      im[k] = s.at(t, k).imag();
    }
    im[0] = 0.0;
    im[n / 2] = 0.0;
    for (std::size_t k = bins; k < n; ++k) {
      re[k] = re[n - k];
      im[k] = -im[n - k];
    }
    plan.transform(re.data(), im.data(), true);
    const std::size_t start = t * p.hop;
    for (std::size_t i = 0; i < n; ++i) {
      acc[start + i] += re[i] / static_cast<double>(n) * window[i];
      wsum[start + i] += window[i] * window[i];
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    acc[i] = wsum[i] > 1e-11 ? acc[i] / wsum[i] : 0.0;
  }
  return acc;
}

/// Inverse of `stft`. Removes the centering pad, so the output holds
/// (T-1)*hop samples; a single frame cannot be inverted.
inline Waveform istft(const ComplexSpectrogram& s) {
  if (s.n_frames < 2) {
    throw Error(Errc::kMinFrames, "istft needs at least 2 frames, got " + std::to_string(s.n_frames));
  }
  const auto full = overlap_add(s);
  const std::size_t pad = center_pad(s.params);
  const std::size_t out_len = (s.n_frames - 1) * s.params.hop;
  Waveform w;
  w.sample_rate = s.params.sample_rate;
  w.samples.assign(full.begin() + static_cast<std::ptrdiff_t>(pad),
                   full.begin() + static_cast<std::ptrdiff_t>(pad + out_len));
  return w;
}

/// |STFT| of a generic-scalar signal, frame-major T x n_bins. Used by the
/// spectral loss so that derivatives propagate through the analysis.
template <class T>
std::vector<T> stft_magnitudes(std::span<const T> x, const AudioParams& p, std::size_t* n_frames_out) {
  using std::sqrt;
  if (x.empty()) throw Error(Errc::kEmptySignal, "stft_magnitudes: empty signal");
  const std::size_t pad = center_pad(p);
  const auto padded = reflect_pad<T>(x, pad, pad);
  const std::size_t frames = stft_frame_count(x.size(), p);
  std::vector<T> re, im;
  analyze_frames<T>(padded, frames, p, re, im);
  std::vector<T> mag(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    const T power = re[i] * re[i] + im[i] * im[i];
    mag[i] = value_of(power) > 0.0 ? T(sqrt(power)) : T(0.0);
  }
  if (n_frames_out) *n_frames_out = frames;
  return mag;
}

inline MagnitudeFrames magnitudes(const ComplexSpectrogram& s) {
  MagnitudeFrames m{s.n_frames, s.n_bins, std::vector<double>(s.data.size())};
  for (std::size_t i = 0; i < s.data.size(); ++i) m.data[i] = std::abs(s.data[i]);
  return m;
}

}  // namespace lavoce::dsp
