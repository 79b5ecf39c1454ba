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
#include <string>
#include <vector>

#include "lavoce/nn/config.hpp"
#include "lavoce/nn/layers.hpp"
#include "lavoce/nn/manifest.hpp"

namespace lavoce::nn {

inline constexpr double kVocoderSlope = 0.1;
inline constexpr double kFinalSlope = 0.01;

namespace detail {

/// Dilated residual block: per dilation, leaky -> conv(d) -> leaky -> conv(1) -> add.
template <class T>
Mat<T> resblock(const Mat<T>& x, const BasicTensorBundle<T>& w, const std::string& p, std::size_t kernel,
                const std::vector<std::size_t>& dilations) {
  Mat<T> out = x;
  for (std::size_t n = 0; n < dilations.size(); ++n) {
    const std::string c1 = p + ".convs1." + std::to_string(n), c2 = p + ".convs2." + std::to_string(n);
    const std::size_t d = dilations[n];
    Mat<T> t = out;
    leaky_relu_inplace(t, kVocoderSlope);
    t = conv1d(t, w.get(c1 + ".weight"), &w.get(c1 + ".bias"), 1, d * (kernel - 1) / 2, d);
    leaky_relu_inplace(t, kVocoderSlope);
    t = conv1d(t, w.get(c2 + ".weight"), &w.get(c2 + ".bias"), 1, (kernel - 1) / 2, 1);
    out += t;
  }
  return out;
}

}  // namespace detail

/// Log-mel frames (T x n_mels) -> waveform of hop * T samples in [-1, 1].
template <class T>
std::vector<T> vocoder_forward(const Mat<T>& mel, const BasicTensorBundle<T>& w, const VocoderConfig& c) {
  using std::tanh;
  c.validate();
  if (static_cast<std::size_t>(mel.cols()) != c.n_mels || mel.rows() < 1) {
    throw Error(Errc::kShapeMismatch, "vocoder: expected T x " + std::to_string(c.n_mels) + " mel input");
  }
  Mat<T> x = conv1d(Mat<T>(mel.transpose()), w.get("conv_pre.weight"), &w.get("conv_pre.bias"), 1, 3);
  const std::size_t nk = c.resblock_kernels.size();
  for (std::size_t i = 0; i < c.upsample_rates.size(); ++i) {
    leaky_relu_inplace(x, kVocoderSlope);
    const std::string u = "ups." + std::to_string(i);
    x = conv_transpose1d(x, w.get(u + ".weight"), &w.get(u + ".bias"), c.upsample_rates[i],
                         (c.upsample_kernels[i] - c.upsample_rates[i]) / 2);
    Mat<T> acc = Mat<T>::Zero(x.rows(), x.cols());
    for (std::size_t j = 0; j < nk; ++j) {
      acc += detail::resblock(x, w, "resblocks." + std::to_string(i * nk + j), c.resblock_kernels[j],
                              c.resblock_dilations[j]);
    }
    x = acc / T(static_cast<double>(nk));
  }
  leaky_relu_inplace(x, kFinalSlope);
  x = conv1d(x, w.get("conv_post.weight"), &w.get("conv_post.bias"), 1, 3);
  std::vector<T> out(static_cast<std::size_t>(x.cols()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = tanh(x(0, idx(i)));
  if (out.size() != c.hop * static_cast<std::size_t>(mel.rows())) {
    throw Error(Errc::kShapeMismatch, "vocoder produced " + std::to_string(out.size()) + " samples");
  }
  return out;
}

}  // namespace lavoce::nn
