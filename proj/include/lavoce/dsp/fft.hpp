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
#include <numbers>
#include <utility>
#include <vector>

#include "lavoce/core/error.hpp"

namespace lavoce::dsp {

/// Iterative radix-2 FFT over split real/imaginary arrays. The scalar type
/// is a template parameter so the same kernel serves the double path and the
/// dual-number path used for derivative checks.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n), rev_(n), cos_(n / 2), sin_(n / 2) {
    if (n < 1 || (n & (n - 1)) != 0) {
      throw Error(Errc::kInvalidArgument, "FFT size must be a power of two");
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      rev_[i] = r;
    }
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      cos_[k] = std::cos(a);
      sin_[k] = std::sin(a);
    }
  }

  std::size_t size() const { return n_; }

  /// In-place transform. The inverse is unnormalized (no 1/n).
  template <class T>
  void transform(T* re, T* im, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < rev_[i]) {
        std::swap(re[i], re[rev_[i]]);
        std::swap(im[i], im[rev_[i]]);
      }
    }
    const double sign = inverse ? -1.0 : 1.0;
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          const double wr = cos_[j * step];
          const double wi = sign * sin_[j * step];
          const std::size_t a = start + j;
          const std::size_t b = a + half;
          T tr = re[b] * wr - im[b] * wi;
          T ti = re[b] * wi + im[b] * wr;
          re[b] = re[a] - tr;
          im[b] = im[a] - ti;
          re[a] += tr;
          im[a] += ti;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> rev_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace lavoce::dsp
