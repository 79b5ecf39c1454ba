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

// Deterministic synthetic signals for self-tests and demos.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

#include "lavoce/core/random.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::dsp {

inline Waveform sine(double freq_hz, double amplitude, std::size_t n, double rate = kDefaultSampleRate,
                     double phase = 0.0) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate + phase);
  }
  return w;
}

inline Waveform white_noise(std::size_t n, std::uint64_t seed, double stddev = 0.1,
                            double rate = kDefaultSampleRate) {
  Rng rng(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (auto& s : w.samples) s = dist(rng);
  return w;
}

/// Voiced-speech stand-in: a harmonic series on a gliding pitch contour with
/// a syllable-rate envelope (including short pauses) and falling spectral
/// tilt.
inline Waveform speech_like(std::size_t n, std::uint64_t seed, double rate = kDefaultSampleRate) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double f0_base = 100.0 + 80.0 * u(rng);
  const double glide_rate = 0.5 + u(rng);
  const double syllable_rate = 3.0 + 2.0 * u(rng);
  const double syllable_phase = 2.0 * std::numbers::pi * u(rng);
  constexpr int kHarmonics = 30;
  double phases[kHarmonics];
  for (double& p : phases) p = 2.0 * std::numbers::pi * u(rng);

  Waveform w;
  w.sample_rate = rate;
  w.samples.assign(n, 0.0);
  double theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double f0 = f0_base * (1.0 + 0.15 * std::sin(2.0 * std::numbers::pi * glide_rate * t));
    theta += 2.0 * std::numbers::pi * f0 / rate;
    const double env_raw = std::sin(2.0 * std::numbers::pi * syllable_rate * t / 2.0 + syllable_phase);
    const double env = std::pow(std::abs(env_raw), 1.5);
    double s = 0.0;
    for (int h = 1; h <= kHarmonics; ++h) {
      if (f0 * h >= rate / 2.0) break;
      const double formant = 1.0 + 2.0 * std::exp(-std::pow((f0 * h - 700.0) / 250.0, 2.0)) +
                             1.5 * std::exp(-std::pow((f0 * h - 1800.0) / 400.0, 2.0));
      s += formant / h * std::sin(h * theta + phases[h - 1]);
    }
    w.samples[i] = 0.2 * env * s;
  }
  return w;
}

}  // namespace lavoce::dsp
