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

#include <string>
#include <vector>

#include "lavoce/nn/config.hpp"
#include "lavoce/nn/layers.hpp"
#include "lavoce/nn/manifest.hpp"

namespace lavoce::nn {

inline constexpr double kDiscSlope = 0.1;

/// One sub-discriminator's final map and every intermediate feature map,
/// flattened.
template <class T>
struct DiscOutput {
  std::vector<T> output;
  std::vector<std::vector<T>> features;
};

namespace detail {

template <class T>
std::vector<T> flatten(const Mat<T>& m) {
  std::vector<T> out(static_cast<std::size_t>(m.size()));
  RowMat<T> r = m;
  std::copy(r.data(), r.data() + r.size(), out.begin());
  return out;
}

}  // namespace detail

/// Right reflection padding of `len` samples up to a multiple of `period`.
inline std::size_t period_padded_length(std::size_t len, std::size_t period) {
  return len % period == 0 ? len : len + (period - len % period);
}

/// Period sub-discriminator: the waveform is folded into rows of `period`
/// samples and each column runs through the same (k x 1) conv stack.
template <class T>
DiscOutput<T> period_discriminator(const std::vector<T>& wav, std::size_t period, const BasicTensorBundle<T>& w,
                                   const std::string& p, const VocoderConfig& c) {
  if (wav.size() < period) throw Error(Errc::kTooShort, "period discriminator input shorter than its period");
  const std::size_t padded = period_padded_length(wav.size(), period);
  if (padded - wav.size() >= wav.size()) throw Error(Errc::kTooShort, "input too short to reflect-pad");
  std::vector<T> x = wav;
  for (std::size_t i = wav.size(); i < padded; ++i) x.push_back(wav[2 * wav.size() - 2 - i]);
  const std::size_t rows = padded / period;

  std::vector<Mat<T>> cols(period);
  for (std::size_t j = 0; j < period; ++j) {
    cols[j].resize(1, idx(rows));
    for (std::size_t r = 0; r < rows; ++r) cols[j](0, idx(r)) = x[r * period + j];
  }
  auto layer = [&](const std::string& name, std::size_t stride, std::size_t pad, bool act) {
    BasicTensor<T> k = w.get(name + ".weight");
    k.shape.pop_back();  // (k x 1) kernel acts as a 1D kernel per column
    const auto& b = w.get(name + ".bias");
    std::vector<T> flat;
    for (auto& col : cols) {
      col = conv1d(col, k, &b, stride, pad);
      if (act) leaky_relu_inplace(col, kDiscSlope);
    }
    // feature layout (C, H, period), like a (B, C, H, W) map
    const Index ch = cols[0].rows(), h = cols[0].cols();
    flat.resize(static_cast<std::size_t>(ch * h) * period);
    for (Index cc = 0; cc < ch; ++cc) {
      for (Index hh = 0; hh < h; ++hh) {
        for (std::size_t j = 0; j < period; ++j) flat[(static_cast<std::size_t>(cc * h + hh)) * period + j] = cols[j](cc, hh);
      }
    }
    return flat;
  };
  DiscOutput<T> out;
  const std::size_t pad = c.mpd_kernel / 2;
  for (std::size_t l = 0; l < c.mpd_channels.size(); ++l) {
    const std::size_t stride = l + 1 < c.mpd_channels.size() ? c.mpd_stride : 1;
    out.features.push_back(layer(p + ".convs." + std::to_string(l), stride, pad, true));
  }
  out.output = layer(p + ".conv_post", 1, kMpdPostKernel / 2, false);
  out.features.push_back(out.output);
  return out;
}

/// Non-overlapping average pooling by 2 (floor length).
template <class T>
std::vector<T> avg_pool2(const std::vector<T>& x) {
  std::vector<T> y(x.size() / 2);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (x[2 * i] + x[2 * i + 1]) * T(0.5);
  return y;
}

template <class T>
DiscOutput<T> scale_discriminator(const std::vector<T>& wav, const BasicTensorBundle<T>& w, const std::string& p,
                                  const VocoderConfig& c) {
  Mat<T> x(1, idx(wav.size()));
  for (std::size_t i = 0; i < wav.size(); ++i) x(0, idx(i)) = wav[i];
  DiscOutput<T> out;
  for (std::size_t l = 0; l < c.msd_channels.size(); ++l) {
    const std::string n = p + ".convs." + std::to_string(l);
    x = conv1d(x, w.get(n + ".weight"), &w.get(n + ".bias"), c.msd_strides[l], c.msd_kernels[l] / 2, 1, c.msd_groups[l]);
    leaky_relu_inplace(x, kDiscSlope);
    out.features.push_back(detail::flatten(x));
  }
  x = conv1d(x, w.get(p + ".conv_post.weight"), &w.get(p + ".conv_post.bias"), 1, kMsdPostKernel / 2);
  out.output = detail::flatten(x);
  out.features.push_back(out.output);
  return out;
}

inline constexpr std::size_t kMinDiscriminatorInput = 16;

/// Periods {2, 3, 5, 7, 11} by default.
template <class T>
std::vector<DiscOutput<T>> mpd_forward(const std::vector<T>& wav, const BasicTensorBundle<T>& w, const VocoderConfig& c) {
  std::vector<DiscOutput<T>> out;
  for (std::size_t i = 0; i < c.mpd_periods.size(); ++i) {
    out.push_back(period_discriminator(wav, c.mpd_periods[i], w, "mpd." + std::to_string(i), c));
  }
  return out;
}

/// Raw waveform, then repeatedly 2x average-pooled (lengths L, L/2, L/4).
template <class T>
std::vector<DiscOutput<T>> msd_forward(const std::vector<T>& wav, const BasicTensorBundle<T>& w, const VocoderConfig& c) {
  if (wav.size() < kMinDiscriminatorInput) throw Error(Errc::kTooShort, "scale discriminator needs >= 16 samples");
  std::vector<DiscOutput<T>> out;
  std::vector<T> x = wav;
  for (std::size_t i = 0; i < c.msd_scales; ++i) {
    if (i > 0) x = avg_pool2(x);
    out.push_back(scale_discriminator(x, w, "msd." + std::to_string(i), c));
  }
  return out;
}

/// MPD outputs followed by MSD outputs: N_D entries.
template <class T>
std::vector<DiscOutput<T>> discriminate(const std::vector<T>& wav, const BasicTensorBundle<T>& w, const VocoderConfig& c) {
  auto all = mpd_forward(wav, w, c);
  auto msd = msd_forward(wav, w, c);
  all.insert(all.end(), std::make_move_iterator(msd.begin()), std::make_move_iterator(msd.end()));
  return all;
}

}  // namespace lavoce::nn
