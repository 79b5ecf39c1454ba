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

// Test-only reference computations, written independently of the library's
// fast paths (direct DFTs, explicit index arithmetic).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace lavoce::testing {

/// Direct O(n^2) DFT of a real sequence, bins 0..n/2.
inline std::vector<std::complex<double>> direct_rdft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k * i % n) / static_cast<double>(n);
      acc += x[i] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

/// Sample of the centered, reflect-padded signal at padded index i.
inline double reflected_sample(const std::vector<double>& x, long long i, long long pad) {
  long long j = i - pad;
  const auto n = static_cast<long long>(x.size());
  while (j < 0 || j >= n) {
    if (j < 0) j = -j;
    if (j >= n) j = 2 * (n - 1) - j;
  }
  return x[static_cast<std::size_t>(j)];
}

inline double periodic_hann(std::size_t i, std::size_t n) {
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
}

/// Frequency of the largest DFT magnitude, searched on a fine grid (Hz).
inline double dominant_frequency(const std::vector<double>& x, double rate, double lo_hz, double hi_hz,
                                 double step_hz) {
  double best_f = lo_hz, best = -1;
  for (double f = lo_hz; f <= hi_hz; f += step_hz) {
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double a = -2.0 * std::numbers::pi * f * static_cast<double>(i) / rate;
      acc += x[i] * std::complex<double>(std::cos(a), std::sin(a));
    }
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace lavoce::testing
