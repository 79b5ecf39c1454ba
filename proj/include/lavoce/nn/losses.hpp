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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lavoce/dsp/mel.hpp"
#include "lavoce/nn/config.hpp"
#include "lavoce/nn/discriminators.hpp"
#include "lavoce/nn/layers.hpp"

namespace lavoce::nn {

/// Mean absolute difference.
template <class T>
T l1_mean(std::span<const T> a, std::span<const T> b) {
  using std::abs;
  if (a.size() != b.size() || a.empty()) {
    throw Error(Errc::kShapeMismatch, "l1: sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  T acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    note_branch(a[i] < b[i]);
    acc += abs(a[i] - b[i]);
  }
  return acc / T(static_cast<double>(a.size()));
}

/// Spectrogram enhancement loss: mean L1 over all (frame, band) cells.
template <class T>
T enhancer_loss(const Mat<T>& pred, const Mat<T>& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw Error(Errc::kShapeMismatch, "enhancer_loss: prediction and target shapes differ");
  }
  return l1_mean<T>({pred.data(), static_cast<std::size_t>(pred.size())},
                    {target.data(), static_cast<std::size_t>(target.size())});
}

template <class T>
struct GeneratorLoss {
  T total{0.0}, adv{0.0}, spec{0.0}, fm{0.0};
};

namespace detail {

template <class T>
T mean_square_offset(const std::vector<T>& x, double target) {
  T acc(0.0);
  for (const T& v : x) acc += (v - T(target)) * (v - T(target));
  return acc / T(static_cast<double>(x.size()));
}

template <class T>
void require_ensemble(const std::vector<DiscOutput<T>>& a, const std::vector<DiscOutput<T>>& b) {
  if (a.size() != b.size() || a.empty()) throw Error(Errc::kShapeMismatch, "discriminator ensembles differ in size");
}

}  // namespace detail

/// adv = sum_i mean((D_i(fake) - 1)^2); spec = mean L1 of log-mels;
/// fm = sum_i sum_l mean L1 of layer features; total = weighted sum.
template <class T>
GeneratorLoss<T> generator_loss(std::span<const T> clean, std::span<const T> generated,
                                const std::vector<DiscOutput<T>>& real, const std::vector<DiscOutput<T>>& fake,
                                const LossWeights& lw = {}, const dsp::AudioParams& p = {}) {
  detail::require_ensemble(real, fake);
  if (clean.size() != generated.size()) throw Error(Errc::kShapeMismatch, "generator_loss: waveform lengths differ");
  GeneratorLoss<T> g;
  for (const auto& f : fake) g.adv += detail::mean_square_offset(f.output, 1.0);
  std::size_t fa = 0, fb = 0;
  const auto ma = dsp::log_mel_values<T>(clean, p, &fa);
  const auto mb = dsp::log_mel_values<T>(generated, p, &fb);
  g.spec = l1_mean<T>(ma, mb);
  for (std::size_t i = 0; i < real.size(); ++i) {
    if (real[i].features.size() != fake[i].features.size()) {
      throw Error(Errc::kShapeMismatch, "feature lists differ for discriminator " + std::to_string(i));
    }
    for (std::size_t l = 0; l < real[i].features.size(); ++l) g.fm += l1_mean<T>(real[i].features[l], fake[i].features[l]);
  }
  g.total = T(lw.adv) * g.adv + T(lw.spec) * g.spec + T(lw.fm) * g.fm;
  return g;
}

/// sum_i mean((D_i(real) - 1)^2) + mean(D_i(fake)^2).
template <class T>
T discriminator_loss(const std::vector<DiscOutput<T>>& real, const std::vector<DiscOutput<T>>& fake) {
  detail::require_ensemble(real, fake);
  T acc(0.0);
  for (std::size_t i = 0; i < real.size(); ++i) {
    acc += detail::mean_square_offset(real[i].output, 1.0) + detail::mean_square_offset(fake[i].output, 0.0);
  }
  return acc;
}

}  // namespace lavoce::nn
