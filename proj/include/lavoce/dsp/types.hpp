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
#include <string>
#include <vector>

#include "lavoce/core/error.hpp"

namespace lavoce::dsp {

inline constexpr double kDefaultSampleRate = 16000.0;

/// Mono audio at a given rate. Samples are nominally in [-1, 1]; mixtures
/// before normalization may exceed that range.
struct Waveform {
  std::vector<double> samples;
  double sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

inline void require_nonempty(const Waveform& w, const char* what) {
  if (w.empty()) throw Error(Errc::kEmptySignal, std::string(what) + ": empty waveform");
}

inline void require_finite(const Waveform& w, const char* what) {
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (!std::isfinite(w.samples[i])) {
      throw Error(Errc::kNonFiniteSample,
                  std::string(what) + ": sample " + std::to_string(i) + " is not finite");
    }
  }
}

/// Analysis configuration shared by STFT, mel and inversion routines.
struct AudioParams {
  std::size_t fft_size = 1024;
  std::size_t win_size = 1024;
  std::size_t hop = 256;
  std::size_t n_mels = 80;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-5;
  double sample_rate = kDefaultSampleRate;

  std::size_t n_bins() const { return fft_size / 2 + 1; }
  double frame_rate() const { return sample_rate / static_cast<double>(hop); }

  /// Throws kInvalidArgument when the configuration cannot give a
  /// reconstructible STFT or a well-formed mel filterbank.
  void validate() const {
    auto fail = [](const std::string& m) { throw Error(Errc::kInvalidArgument, "AudioParams: " + m); };
    if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) fail("fft_size must be a power of two");
    if (win_size == 0 || win_size > fft_size) fail("win_size must be in [1, fft_size]");
    if (hop == 0 || hop > win_size) fail("hop must be in [1, win_size]");
    if (n_mels == 0) fail("n_mels must be >= 1");
    if (!(sample_rate > 0)) fail("sample_rate must be positive");
    if (!(f_min >= 0 && f_min < f_max && f_max <= sample_rate / 2)) fail("need 0 <= f_min < f_max <= sample_rate/2");
    if (!(log_floor > 0)) fail("log_floor must be positive");
    // Constant overlap-add of the periodic Hann window at this hop.
    double lo = 1e300, hi = -1e300;
    for (std::size_t n = 0; n < hop; ++n) {
      double s = 0;
      for (std::size_t m = n; m < win_size; m += hop) {
        s += 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) /
                                  static_cast<double>(win_size));
      }
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    if (!(lo > 0) || (hi - lo) > 1e-9 * hi) fail("Hann window does not satisfy COLA at this hop");
  }
};

/// T x (fft_size/2 + 1) complex STFT, row-major by frame.
struct ComplexSpectrogram {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  std::vector<std::complex<double>> data;
  AudioParams params;

  std::complex<double>& at(std::size_t t, std::size_t k) { return data[t * n_bins + k]; }
  const std::complex<double>& at(std::size_t t, std::size_t k) const { return data[t * n_bins + k]; }
};

/// T x n_mels natural-log mel magnitudes, row-major by frame.
struct MelSpectrogram {
  std::size_t n_frames = 0;
  std::size_t n_mels = 0;
  std::vector<double> data;
  AudioParams params;

  double& at(std::size_t t, std::size_t m) { return data[t * n_mels + m]; }
  double at(std::size_t t, std::size_t m) const { return data[t * n_mels + m]; }
};

/// Real T x n_bins matrix of linear magnitudes.
struct MagnitudeFrames {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  std::vector<double> data;

  double& at(std::size_t t, std::size_t k) { return data[t * n_bins + k]; }
  double at(std::size_t t, std::size_t k) const { return data[t * n_bins + k]; }
};

}  // namespace lavoce::dsp
