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
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lavoce/core/error.hpp"
#include "lavoce/core/random.hpp"
#include "lavoce/corrupt/recipe.hpp"
#include "lavoce/dsp/normalize.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::corrupt {

using dsp::Waveform;

/// Mean square over the whole clip.
inline double signal_power(const Waveform& w) {
  dsp::require_nonempty(w, "signal_power");
  double acc = 0.0;
  for (double s : w.samples) acc += s * s;
  return acc / static_cast<double>(w.size());
}

inline double ratio_db(double p_signal, double p_noise) { return 10.0 * std::log10(p_signal / p_noise); }

/// Gain g such that scaling the noise by g yields p_signal / (g^2 p_noise)
/// equal to ratio_db.
inline double gain_for_ratio(double p_signal, double p_noise, double target_db) {
  if (!(p_signal > 0.0) || !(p_noise > 0.0)) {
    throw Error(Errc::kSilentSignal, "gain_for_ratio: signal and noise power must be positive");
  }
  return std::sqrt(p_signal / (p_noise * std::pow(10.0, target_db / 10.0)));
}

/// Loops (from a random offset) or randomly crops `src` to exactly n samples.
inline Waveform fit_length(const Waveform& src, std::size_t n, Rng& rng) {
  dsp::require_nonempty(src, "fit_length");
  Waveform out;
  out.sample_rate = src.sample_rate;
  out.samples.resize(n);
  const std::size_t len = src.size();
  if (len == n) {
    out.samples = src.samples;
  } else if (len < n) {
    const std::size_t offset = std::uniform_int_distribution<std::size_t>(0, len - 1)(rng);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = src.samples[(offset + i) % len];
  } else {
    const std::size_t start = std::uniform_int_distribution<std::size_t>(0, len - n)(rng);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = src.samples[start + i];
  }
  return out;
}

struct MixResult {
  Waveform noisy;          ///< peak-normalized mixture
  Waveform clean;          ///< peak-normalized clean reference
  Waveform premix;         ///< clean + scaled aggregates, before normalization
  Waveform clean_premix;   ///< peak-normalized clean as it entered the sum
  Waveform noise;          ///< scaled noise aggregate (zeros when absent)
  Waveform interference;   ///< scaled interferer aggregate (zeros when absent)
  double noise_gain = 0.0;
  double interference_gain = 0.0;
  double measured_snr_db = std::numeric_limits<double>::infinity();
  double measured_sir_db = std::numeric_limits<double>::infinity();
};

namespace detail {

inline Waveform aggregate(std::span<const Waveform> sources, std::size_t n, double rate, Rng& rng,
                          const char* kind) {
  Waveform sum;
  sum.sample_rate = rate;
  sum.samples.assign(n, 0.0);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].sample_rate != rate) {
      throw Error(Errc::kRateMismatch, std::string(kind) + " " + std::to_string(i) + ": sample rate differs from clean");
    }
    Waveform fitted = fit_length(sources[i], n, rng);
    if (!(dsp::peak_abs(fitted) > 0.0)) {
      throw Error(Errc::kSilentSignal, std::string(kind) + " " + std::to_string(i) + " is silent");
    }
    fitted = dsp::peak_normalize(fitted);
    for (std::size_t k = 0; k < n; ++k) sum.samples[k] += fitted.samples[k];
  }
  return sum;
}

}  // namespace detail

/// Builds one noisy mixture. Every source is length-aligned to the clean
/// clip and peak-normalized; the noises are summed and the sum is scaled as
/// one aggregate to snr_db, likewise the interferers to sir_db. Mixture and
/// clean are peak-normalized separately on output.
inline MixResult mix(const Waveform& clean, std::span<const Waveform> noises,
                     std::span<const Waveform> interferers, const MixRecipe& recipe) {
  recipe.validate();
  dsp::require_nonempty(clean, "mix");
  if (noises.size() != static_cast<std::size_t>(recipe.n_noises) ||
      interferers.size() != static_cast<std::size_t>(recipe.n_interferers)) {
    throw Error(Errc::kLengthMismatch, "mix: got " + std::to_string(noises.size()) + " noises / " +
                                           std::to_string(interferers.size()) + " interferers for recipe (" +
                                           std::to_string(recipe.n_noises) + ", " +
                                           std::to_string(recipe.n_interferers) + ")");
  }
  const std::size_t n = clean.size();
  Rng rng(recipe.seed);
  MixResult r;
  r.clean_premix = dsp::peak_normalize(clean);
  const double p_clean = signal_power(r.clean_premix);

  r.noise = detail::aggregate(noises, n, clean.sample_rate, rng, "noise");
  r.interference = detail::aggregate(interferers, n, clean.sample_rate, rng, "interferer");
  if (!noises.empty()) {
    r.noise_gain = gain_for_ratio(p_clean, signal_power(r.noise), recipe.snr_db);
    for (double& s : r.noise.samples) s *= r.noise_gain;
    r.measured_snr_db = ratio_db(p_clean, signal_power(r.noise));
  }
  if (!interferers.empty()) {
    r.interference_gain = gain_for_ratio(p_clean, signal_power(r.interference), recipe.sir_db);
    for (double& s : r.interference.samples) s *= r.interference_gain;
    r.measured_sir_db = ratio_db(p_clean, signal_power(r.interference));
  }

  r.premix = r.clean_premix;
  for (std::size_t k = 0; k < n; ++k) r.premix.samples[k] += r.noise.samples[k] + r.interference.samples[k];
  r.noisy = dsp::peak_normalize(r.premix);
  r.clean = r.clean_premix;
  return r;
}

inline MixResult mix(const Waveform& clean, const std::vector<Waveform>& noises,
                     const std::vector<Waveform>& interferers, const MixRecipe& recipe) {
  return mix(clean, std::span<const Waveform>(noises), std::span<const Waveform>(interferers), recipe);
}

}  // namespace lavoce::corrupt
