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

#include "lavoce/nn/config.hpp"
#include "lavoce/nn/layers.hpp"
#include "lavoce/nn/manifest.hpp"
#include "lavoce/visual/video_clip.hpp"

namespace lavoce::nn {

namespace detail {

template <class T>
void bn(Mat<T>& x, const BasicTensorBundle<T>& w, const std::string& name) {
  batch_norm_inplace(x, w.get(name + ".weight"), w.get(name + ".bias"), w.get(name + ".running_mean"),
                     w.get(name + ".running_var"));
}

/// 5x7x7 conv, stride (1, 2, 2), padding (2, 3, 3), single input channel.
/// Returns one C x (48*48) map per frame.
template <class T>
std::vector<FeatureMap<T>> stem_conv3d(const visual::VideoClip& clip, const BasicTensor<T>& w) {
  const std::size_t c_out = w.dim(0), kt = w.dim(2), kh = w.dim(3), kw = w.dim(4);
  const std::size_t pt = kt / 2, ph = kh / 2, pw = kw / 2;
  const std::size_t h = clip.height, wd = clip.width;
  const std::size_t oh = conv_out_len(h, kh, 2, ph), ow = conv_out_len(wd, kw, 2, pw);
  const auto wm = as_matrix(w, c_out);
  std::vector<FeatureMap<T>> out(clip.n_frames);
  Mat<T> cols(idx(kt * kh * kw), idx(oh * ow));
  for (std::size_t t = 0; t < clip.n_frames; ++t) {
    for (std::size_t a = 0; a < kt; ++a) {
      const std::ptrdiff_t it = static_cast<std::ptrdiff_t>(t + a) - static_cast<std::ptrdiff_t>(pt);
      const bool frame_ok = it >= 0 && it < static_cast<std::ptrdiff_t>(clip.n_frames);
      for (std::size_t b = 0; b < kh; ++b) {
        for (std::size_t c = 0; c < kw; ++c) {
          const Index row = idx((a * kh + b) * kw + c);
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * 2 + b) - static_cast<std::ptrdiff_t>(ph);
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * 2 + c) - static_cast<std::ptrdiff_t>(pw);
              const bool inside = frame_ok && iy >= 0 && ix >= 0 && iy < static_cast<std::ptrdiff_t>(h) &&
                                  ix < static_cast<std::ptrdiff_t>(wd);
              cols(row, idx(oy * ow + ox)) =
                  inside ? T(clip.at(static_cast<std::size_t>(it), static_cast<std::size_t>(iy), static_cast<std::size_t>(ix)))
                         : T(0.0);
            }
          }
        }
      }
    }
    out[t].height = oh;
    out[t].width = ow;
    out[t].data.noalias() = wm * cols;
  }
  return out;
}

template <class T>
FeatureMap<T> basic_block(const FeatureMap<T>& x, const BasicTensorBundle<T>& w, const std::string& p,
                          std::size_t stride) {
  FeatureMap<T> y = conv2d(x, w.get(p + ".conv1.weight"), static_cast<const BasicTensor<T>*>(nullptr), stride, 1);
  bn(y.data, w, p + ".bn1");
  relu_inplace(y.data);
  y = conv2d(y, w.get(p + ".conv2.weight"), static_cast<const BasicTensor<T>*>(nullptr), 1, 1);
  bn(y.data, w, p + ".bn2");
  if (w.contains(p + ".downsample.conv.weight")) {
    FeatureMap<T> s = conv2d(x, w.get(p + ".downsample.conv.weight"), static_cast<const BasicTensor<T>*>(nullptr), stride, 0);
    bn(s.data, w, p + ".downsample.bn");
    y.data += s.data;
  } else {
    y.data += x.data;
  }
  relu_inplace(y.data);
  return y;
}

}  // namespace detail

/// One visual_feat_dim vector per video frame (T_v x V).
template <class T>
Mat<T> visual_encode(const visual::VideoClip& clip, const BasicTensorBundle<T>& w, const EnhancerConfig& c) {
  clip.validate();
  const std::size_t c0 = c.visual_feat_dim / 8;
  const auto& stem_w = w.get("visual.stem.conv.weight", {c0, 1, 5, 7, 7});
  auto frames = detail::stem_conv3d(clip, stem_w);
  Mat<T> out(idx(clip.n_frames), idx(c.visual_feat_dim));
  for (std::size_t t = 0; t < clip.n_frames; ++t) {
    FeatureMap<T> x = std::move(frames[t]);
    detail::bn(x.data, w, "visual.stem.bn");
    relu_inplace(x.data);
    x = max_pool2d(x, 3, 2, 1);
    for (std::size_t s = 0; s < kResNetStages; ++s) {
      const std::string p = "visual.trunk.layer" + std::to_string(s + 1);
      x = detail::basic_block(x, w, p + ".0", s == 0 ? 1 : 2);
      x = detail::basic_block(x, w, p + ".1", 1);
    }
    if (x.channels() != c.visual_feat_dim) throw Error(Errc::kShapeMismatch, "visual trunk width mismatch");
    const T inv(1.0 / static_cast<double>(x.height * x.width));
    for (Index ch = 0; ch < x.data.rows(); ++ch) out(idx(t), ch) = x.data.row(ch).sum() * inv;
  }
  return out;
}

}  // namespace lavoce::nn
