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
#include <limits>
#include <numbers>
#include <vector>

#include "lavoce/core/error.hpp"
#include "lavoce/dsp/fft.hpp"
#include "lavoce/dsp/resample.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::metrics {

using dsp::Waveform;

namespace stoi_detail {

inline constexpr double kRate = 10000.0;
inline constexpr std::size_t kFrame = 256;
inline constexpr std::size_t kHop = kFrame / 2;
inline constexpr std::size_t kFft = 512;
inline constexpr std::size_t kBands = 15;
inline constexpr double kMinFreq = 150.0;
inline constexpr std::size_t kSegment = 30;  // 384 ms
inline constexpr double kBetaDb = -15.0;
inline constexpr double kDynamicRangeDb = 40.0;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// Hann of length n + 2 without its zero end points.
inline std::vector<double> hann_inner(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(n + 1));
  }
  return w;
}

/// Drops frames whose reference energy is more than 40 dB under the
/// loudest frame, then overlap-adds the survivors back together.
inline void remove_silent_frames(std::vector<double>& x, std::vector<double>& y) {
  const auto w = hann_inner(kFrame);
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i + kFrame < x.size(); i += kHop) starts.push_back(i);
  std::vector<double> energy(starts.size());
  for (std::size_t f = 0; f < starts.size(); ++f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < kFrame; ++i) {
      const double v = w[i] * x[starts[f] + i];
      acc += v * v;
    }
    energy[f] = 20.0 * std::log10(std::sqrt(acc) + kEps);
  }
  const double peak = energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
  std::vector<std::size_t> keep;
  for (std::size_t f = 0; f < starts.size(); ++f) {
    if (peak - kDynamicRangeDb - energy[f] < 0.0) keep.push_back(starts[f]);
  }
  const std::size_t n = keep.empty() ? 0 : (keep.size() - 1) * kHop + kFrame;
  std::vector<double> xs(n, 0.0), ys(n, 0.0);
  for (std::size_t f = 0; f < keep.size(); ++f) {
    for (std::size_t i = 0; i < kFrame; ++i) {
      xs[f * kHop + i] += w[i] * x[keep[f] + i];
      ys[f * kHop + i] += w[i] * y[keep[f] + i];
    }
  }
  x = std::move(xs);
  y = std::move(ys);
}

/// One-third-octave band envelopes: kBands x frames, row-major.
struct BandEnvelopes {
  std::size_t n_frames = 0;
  std::vector<double> data;
  double at(std::size_t band, std::size_t t) const { return data[band * n_frames + t]; }
};

inline std::vector<std::pair<std::size_t, std::size_t>> third_octave_bins() {
  const std::size_t bins = kFft / 2 + 1;
  auto nearest = [&](double hz) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < bins; ++k) {
      const double d = std::abs(static_cast<double>(k) * kRate / static_cast<double>(kFft) - hz);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < kBands; ++b) {
    const double k = static_cast<double>(b);
    out.emplace_back(nearest(kMinFreq * std::pow(2.0, (2 * k - 1) / 6.0)),
                     nearest(kMinFreq * std::pow(2.0, (2 * k + 1) / 6.0)));
  }
  return out;
}

inline BandEnvelopes band_envelopes(const std::vector<double>& x) {
  static const dsp::FftPlan plan(kFft);
  static const auto bands = third_octave_bins();
  const auto w = hann_inner(kFrame);
  BandEnvelopes env;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i + kFrame < x.size(); i += kHop) starts.push_back(i);
  env.n_frames = starts.size();
  env.data.assign(kBands * env.n_frames, 0.0);
  std::vector<double> re(kFft), im(kFft), power(kFft / 2 + 1);
  for (std::size_t f = 0; f < starts.size(); ++f) {
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    for (std::size_t i = 0; i < kFrame; ++i) re[i] = w[i] * x[starts[f] + i];
    plan.transform(re.data(), im.data(), false);
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = re[k] * re[k] + im[k] * im[k];
    for (std::size_t b = 0; b < kBands; ++b) {
      double acc = 0.0;
      for (std::size_t k = bands[b].first; k < bands[b].second; ++k) acc += power[k];
      env.data[b * env.n_frames + f] = std::sqrt(acc);
    }
  }
  return env;
}

inline std::pair<BandEnvelopes, BandEnvelopes> front_end(const Waveform& ref, const Waveform& deg, const char* what) {
  dsp::require_nonempty(ref, what);
  dsp::require_nonempty(deg, what);
  if (ref.sample_rate != deg.sample_rate) {
    throw Error(Errc::kRateMismatch, std::string(what) + ": sample rates differ");
  }
  auto x = ref.sample_rate == kRate ? ref.samples : dsp::resample(ref, kRate).samples;
  auto y = deg.sample_rate == kRate ? deg.samples : dsp::resample(deg, kRate).samples;
  const std::size_t n = std::min(x.size(), y.size());
  x.resize(n);
  y.resize(n);
  remove_silent_frames(x, y);
  auto ex = band_envelopes(x);
  auto ey = band_envelopes(y);
  if (ex.n_frames < kSegment) {
    throw Error(Errc::kTooShort, std::string(what) + ": " + std::to_string(ex.n_frames) +
                                     " active frames, need at least 30 (384 ms)");
  }
  return {std::move(ex), std::move(ey)};
}

}  // namespace stoi_detail

/// Short-time objective intelligibility.
inline double stoi(const Waveform& ref, const Waveform& deg) {
  using namespace stoi_detail;
  const auto [x, y] = front_end(ref, deg, "stoi");
  const std::size_t n = kSegment;
  const double clip = 1.0 + std::pow(10.0, -kBetaDb / 20.0);
  const std::size_t segments = x.n_frames - n + 1;
  std::vector<double> xs(n), ys(n);
  double total = 0.0;
  for (std::size_t m = 0; m < segments; ++m) {
    for (std::size_t b = 0; b < kBands; ++b) {
      double nx = 0.0, ny = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x.at(b, m + i);
        ys[i] = y.at(b, m + i);
        nx += xs[i] * xs[i];
        ny += ys[i] * ys[i];
      }
      const double alpha = std::sqrt(nx) / (std::sqrt(ny) + kEps);
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        ys[i] = std::min(ys[i] * alpha, xs[i] * clip);
        mx += xs[i];
        my += ys[i];
      }
      mx /= static_cast<double>(n);
      my /= static_cast<double>(n);
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double a = xs[i] - mx, c = ys[i] - my;
        sxx += a * a;
        syy += c * c;
        sxy += a * c;
      }
      total += sxy / ((std::sqrt(sxx) + kEps) * (std::sqrt(syy) + kEps));
    }
  }
  return total / static_cast<double>(segments * kBands);
}

/// Extended STOI: each segment is mean/norm normalized along time, then
/// along frequency, and the normalized matrices are correlated.
inline double estoi(const Waveform& ref, const Waveform& deg) {
  using namespace stoi_detail;
  const auto [x, y] = front_end(ref, deg, "estoi");
  const std::size_t n = kSegment;
  const std::size_t segments = x.n_frames - n + 1;
  auto normalize = [&](const BandEnvelopes& e, std::size_t m, std::vector<double>& seg) {
    seg.resize(kBands * n);
    for (std::size_t b = 0; b < kBands; ++b) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += e.at(b, m + i);
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        seg[b * n + i] = e.at(b, m + i) - mean;
        ss += seg[b * n + i] * seg[b * n + i];
      }
      const double inv = 1.0 / (std::sqrt(ss) + kEps);
      for (std::size_t i = 0; i < n; ++i) seg[b * n + i] *= inv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double mean = 0.0;
      for (std::size_t b = 0; b < kBands; ++b) mean += seg[b * n + i];
      mean /= static_cast<double>(kBands);
      double ss = 0.0;
      for (std::size_t b = 0; b < kBands; ++b) {
        seg[b * n + i] -= mean;
        ss += seg[b * n + i] * seg[b * n + i];
      }
      const double inv = 1.0 / (std::sqrt(ss) + kEps);
      for (std::size_t b = 0; b < kBands; ++b) seg[b * n + i] *= inv;
    }
  };
  std::vector<double> sx, sy;
  double total = 0.0;
  for (std::size_t m = 0; m < segments; ++m) {
    normalize(x, m, sx);
    normalize(y, m, sy);
    double acc = 0.0;
    for (std::size_t i = 0; i < sx.size(); ++i) acc += sx[i] * sy[i];
    total += acc / static_cast<double>(n);
  }
  return total / static_cast<double>(segments);
}

}  // namespace lavoce::metrics
