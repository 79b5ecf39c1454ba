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
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "lavoce/core/error.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::dsp {

namespace detail {

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

struct SincKernel {
  static constexpr double kZeroCrossings = 32.0;
  static constexpr double kRolloff = 0.95;
  static constexpr double kBeta = 8.6;

  double cutoff;
  double half_width;
  double i0_beta = std::cyl_bessel_i(0.0, kBeta);

  explicit SincKernel(double ratio)
      : cutoff(std::min(1.0, ratio) * kRolloff), half_width(kZeroCrossings / cutoff) {}

  /// Tap weight at distance t (input samples) from the output position.
  double operator()(double t) const {
    const double r = t / half_width;
    if (std::abs(r) > 1.0) return 0.0;
    const double win = std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - r * r)) / i0_beta;
    return cutoff * sinc(cutoff * t) * win;
  }
};

}  // namespace detail

/// Band-limited resampling with a Kaiser-windowed sinc kernel evaluated at
/// the exact fractional input position of every output sample. The cutoff
/// sits slightly below the lower of the two Nyquist rates. Integer rate
/// pairs reuse one tap table per output phase.
inline Waveform resample(const Waveform& w, double target_rate) {
  if (!(target_rate > 0.0)) throw Error(Errc::kInvalidArgument, "resample: target rate must be positive");
  if (target_rate == w.sample_rate) return w;
  const double ratio = target_rate / w.sample_rate;
  const detail::SincKernel kernel(ratio);
  const auto n_in = static_cast<long long>(w.size());
  const auto n_out = static_cast<std::size_t>(std::llround(static_cast<double>(w.size()) * ratio));
  const auto reach = static_cast<long long>(std::ceil(kernel.half_width));

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.assign(n_out, 0.0);

  const bool integral = std::floor(target_rate) == target_rate && std::floor(w.sample_rate) == w.sample_rate;
  std::int64_t up = 0, down = 0;
  if (integral) {
    const auto a = static_cast<std::int64_t>(target_rate), b = static_cast<std::int64_t>(w.sample_rate);
    const auto g = std::gcd(a, b);
    up = a / g;
    down = b / g;
  }

  if (integral && up <= 4096) {
    // Output m sits at input position m*down/up = base + phase/up.
    const std::size_t taps = static_cast<std::size_t>(2 * reach + 1);
    std::vector<double> table(static_cast<std::size_t>(up) * taps);
    for (std::int64_t ph = 0; ph < up; ++ph) {
      const double frac = static_cast<double>(ph) / static_cast<double>(up);
      for (std::size_t j = 0; j < taps; ++j) {
        const double offset = static_cast<double>(static_cast<long long>(j) - reach);
        table[static_cast<std::size_t>(ph) * taps + j] = kernel(frac - offset);
      }
    }
    for (std::size_t m = 0; m < n_out; ++m) {
      const auto pos = static_cast<std::int64_t>(m) * down;
      const long long base = pos / up;
      const auto ph = static_cast<std::size_t>(pos % up);
      const double* k = &table[ph * taps];
      double acc = 0.0;
      const long long lo = std::max<long long>(0, base - reach);
      const long long hi = std::min<long long>(n_in - 1, base + reach);
      for (long long n = lo; n <= hi; ++n) {
        acc += w.samples[static_cast<std::size_t>(n)] * k[n - base + reach];
      }
      out.samples[m] = acc;
    }
    return out;
  }

  for (std::size_t m = 0; m < n_out; ++m) {
    const double center = static_cast<double>(m) / ratio;
    const auto base = static_cast<long long>(std::floor(center));
    const long long lo = std::max<long long>(0, base - reach);
    const long long hi = std::min<long long>(n_in - 1, base + reach + 1);
    double acc = 0.0;
    for (long long n = lo; n <= hi; ++n) {
      acc += w.samples[static_cast<std::size_t>(n)] * kernel(center - static_cast<double>(n));
    }
    out.samples[m] = acc;
  }
  return out;
}

}  // namespace lavoce::dsp
