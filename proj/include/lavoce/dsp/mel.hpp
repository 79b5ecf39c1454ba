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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lavoce/core/dual.hpp"
#include "lavoce/core/error.hpp"
#include "lavoce/core/kink.hpp"
#include "lavoce/dsp/stft.hpp"
#include "lavoce/dsp/types.hpp"

namespace lavoce::dsp {

// Slaney mel scale: linear below 1 kHz (200/3 Hz per mel), logarithmic above.
inline constexpr double kSlaneyLinearStep = 200.0 / 3.0;
inline constexpr double kSlaneyBreakHz = 1000.0;
inline constexpr double kSlaneyBreakMel = kSlaneyBreakHz / kSlaneyLinearStep;
inline const double kSlaneyLogStep = std::log(6.4) / 27.0;

inline double hz_to_mel(double hz) {
  if (hz < kSlaneyBreakHz) return hz / kSlaneyLinearStep;
  return kSlaneyBreakMel + std::log(hz / kSlaneyBreakHz) / kSlaneyLogStep;
}

inline double mel_to_hz(double mel) {
  if (mel < kSlaneyBreakMel) return mel * kSlaneyLinearStep;
  return kSlaneyBreakHz * std::exp(kSlaneyLogStep * (mel - kSlaneyBreakMel));
}

/// Triangular filters with Slaney area normalization (peak 2 / bandwidth Hz).
/// Dense n_mels x n_bins matrix.
inline Eigen::MatrixXd mel_filterbank(const AudioParams& p) {
  p.validate();
  const std::size_t bins = p.n_bins();
  const std::size_t m = p.n_mels;
  std::vector<double> fft_hz(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    fft_hz[k] = static_cast<double>(k) * p.sample_rate / static_cast<double>(p.fft_size);
  }
  const double lo = hz_to_mel(p.f_min), hi = hz_to_mel(p.f_max);
  std::vector<double> edges(m + 2);
  for (std::size_t i = 0; i < m + 2; ++i) {
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m + 1));
  }
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(bins));
  for (std::size_t i = 0; i < m; ++i) {
    const double left = edges[i], center = edges[i + 1], right = edges[i + 2];
    const double norm = 2.0 / (right - left);
    for (std::size_t k = 0; k < bins; ++k) {
      const double up = (fft_hz[k] - left) / (center - left);
      const double down = (right - fft_hz[k]) / (right - center);
      const double v = std::max(0.0, std::min(up, down));
      fb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v * norm;
    }
  }
  return fb;
}

/// Nonzero support of each filter; the filterbank is very sparse.
struct SparseFilter {
  std::size_t first = 0;
  std::vector<double> weights;
};

inline std::vector<SparseFilter> sparse_filters(const Eigen::MatrixXd& fb) {
  std::vector<SparseFilter> out(static_cast<std::size_t>(fb.rows()));
  for (Eigen::Index i = 0; i < fb.rows(); ++i) {
    Eigen::Index a = 0, b = fb.cols() - 1;
    while (a < fb.cols() && fb(i, a) == 0.0) ++a;
    while (b > a && fb(i, b) == 0.0) --b;
    auto& f = out[static_cast<std::size_t>(i)];
    f.first = static_cast<std::size_t>(a);
    for (Eigen::Index k = a; k <= b && a < fb.cols(); ++k) f.weights.push_back(fb(i, k));
  }
  return out;
}

/// Log-mel of frame-major magnitudes for any scalar type. Returns T x n_mels.
template <class T>
std::vector<T> log_mel_from_magnitudes(std::span<const T> mags, std::size_t n_frames,
                                       const AudioParams& p) {
  using std::log;
  const auto filters = sparse_filters(mel_filterbank(p));
  const std::size_t bins = p.n_bins();
  std::vector<T> out(n_frames * p.n_mels);
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (std::size_t m = 0; m < p.n_mels; ++m) {
      const auto& f = filters[m];
      T acc(0.0);
      for (std::size_t j = 0; j < f.weights.size(); ++j) acc += mags[t * bins + f.first + j] * f.weights[j];
      const bool floored = value_of(acc) < p.log_floor;
      note_branch(floored);
      if (floored) acc = T(p.log_floor);
      out[t * p.n_mels + m] = log(acc);
    }
  }
  return out;
}

/// Generic-scalar log-mel of a raw sample sequence.
template <class T>
std::vector<T> log_mel_values(std::span<const T> samples, const AudioParams& p, std::size_t* n_frames) {
  std::size_t frames = 0;
  const auto mags = stft_magnitudes<T>(samples, p, &frames);
  if (n_frames) *n_frames = frames;
  return log_mel_from_magnitudes<T>(mags, frames, p);
}

/// |stft| -> mel filterbank -> clamp at log_floor -> natural log.
inline MelSpectrogram log_mel(const Waveform& w, const AudioParams& p) {
  require_nonempty(w, "log_mel");
  const auto s = stft(w, p);
  const auto mags = magnitudes(s);
  MelSpectrogram mel;
  mel.params = p;
  mel.n_frames = s.n_frames;
  mel.n_mels = p.n_mels;
  mel.data = log_mel_from_magnitudes<double>(mags.data, s.n_frames, p);
  return mel;
}

/// Moore-Penrose pseudo-inverse of the filterbank (n_bins x n_mels).
inline Eigen::MatrixXd mel_pseudo_inverse(const AudioParams& p) {
  const Eigen::MatrixXd fb = mel_filterbank(p);
  return fb.completeOrthogonalDecomposition().pseudoInverse();
}

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_outer = 0) {
  const Eigen::Index n = a.cols();
  if (max_outer <= 0) max_outer = static_cast<int>(3 * n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd grad = a.transpose() * b;
  const double tol = 1e-12 * std::max(1.0, grad.cwiseAbs().maxCoeff());

  auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(b);
    s.setZero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) s(idx[c]) = z(static_cast<Eigen::Index>(c));
  };

  Eigen::VectorXd s(n);
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && grad(j) > best_w) {
        best_w = grad(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < 3 * n; ++inner) {
      solve_passive(s);
      double alpha = 1.0;
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          feasible = false;
          alpha = std::min(alpha, x(j) / (x(j) - s(j)));
        }
      }
      if (feasible) break;
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= 1e-15) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    x = s;
    grad = a.transpose() * (b - a * x);
  }
  return x;
}

enum class MelInverse {
  kPseudoInverse,  ///< pinv(filterbank) * exp(mel), negatives clamped
  kNonNegative,    ///< per-frame non-negative least squares
};

/// exp(mel) mapped back to linear magnitudes. The default applies the
/// filterbank pseudo-inverse and clamps negatives to zero.
inline MagnitudeFrames mel_to_linear(const MelSpectrogram& mel, MelInverse method = MelInverse::kPseudoInverse) {
  const AudioParams& p = mel.params;
  if (mel.n_mels != p.n_mels || mel.data.size() != mel.n_frames * mel.n_mels || mel.n_frames == 0) {
    throw Error(Errc::kShapeMismatch, "mel spectrogram shape does not match its params");
  }
  Eigen::MatrixXd lin_mel(static_cast<Eigen::Index>(p.n_mels), static_cast<Eigen::Index>(mel.n_frames));
  for (std::size_t t = 0; t < mel.n_frames; ++t) {
    for (std::size_t m = 0; m < mel.n_mels; ++m) {
      lin_mel(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(t)) = std::exp(mel.at(t, m));
    }
  }
  Eigen::MatrixXd lin;
  if (method == MelInverse::kPseudoInverse) {
    lin = mel_pseudo_inverse(p) * lin_mel;
  } else {
    const Eigen::MatrixXd fb = mel_filterbank(p);
    lin.resize(fb.cols(), lin_mel.cols());
    for (Eigen::Index t = 0; t < lin_mel.cols(); ++t) lin.col(t) = nnls(fb, lin_mel.col(t));
  }
  MagnitudeFrames out{mel.n_frames, p.n_bins(), std::vector<double>(mel.n_frames * p.n_bins())};
  for (std::size_t t = 0; t < mel.n_frames; ++t) {
    for (std::size_t k = 0; k < out.n_bins; ++k) {
      out.at(t, k) = std::max(0.0, lin(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)));
    }
  }
  return out;
}

}  // namespace lavoce::dsp
