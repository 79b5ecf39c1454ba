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
#include "lavoce/nn/visual_encoder.hpp"
#include "lavoce/visual/align.hpp"

namespace lavoce::nn {

inline constexpr double kAudioFrameRate = 16000.0 / 256.0;

/// Sinusoidal encodings of relative distances T-1, T-2, ..., -(T-1).
inline Mat<double> relative_positions(std::size_t frames, std::size_t d) {
  const std::size_t n = 2 * frames - 1;
  Mat<double> pe(idx(n), idx(d));
  for (std::size_t r = 0; r < n; ++r) {
    const double dist = static_cast<double>(frames) - 1.0 - static_cast<double>(r);
    for (std::size_t i = 0; i < d; i += 2) {
      const double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) / static_cast<double>(d));
      pe(idx(r), idx(i)) = std::sin(dist * freq);
      if (i + 1 < d) pe(idx(r), idx(i + 1)) = std::cos(dist * freq);
    }
  }
  return pe;
}

/// Attention maps of every layer and head, kept when requested.
struct AttentionTrace {
  std::vector<Mat<double>> maps;
};

namespace detail {

template <class T>
const BasicTensor<T>* bias_of(const BasicTensorBundle<T>& w, const std::string& p) {
  return &w.get(p + ".bias");
}

/// Multi-head self-attention with learned content (u) and position (v)
/// biases over relative sinusoidal encodings.
template <class T>
Mat<T> rel_attention(const Mat<T>& x, const Mat<T>& pos, const BasicTensorBundle<T>& w, const std::string& p,
                     const EnhancerConfig& c, AttentionTrace* trace) {
  using std::sqrt;
  const std::size_t frames = static_cast<std::size_t>(x.rows());
  const std::size_t h = c.n_heads, dk = c.head_dim();
  const Mat<T> q = linear(x, w.get(p + ".linear_q.weight"), bias_of(w, p + ".linear_q"));
  const Mat<T> k = linear(x, w.get(p + ".linear_k.weight"), bias_of(w, p + ".linear_k"));
  const Mat<T> v = linear(x, w.get(p + ".linear_v.weight"), bias_of(w, p + ".linear_v"));
  const Mat<T> pe = linear(pos, w.get(p + ".linear_pos.weight"), static_cast<const BasicTensor<T>*>(nullptr));
  const auto& u = w.get(p + ".pos_bias_u");
  const auto& vb = w.get(p + ".pos_bias_v");
  const T scale(1.0 / std::sqrt(static_cast<double>(dk)));
  Mat<T> ctx(idx(frames), idx(c.attn_dim));
  for (std::size_t head = 0; head < h; ++head) {
    const Index off = idx(head * dk);
    Mat<T> qu = q.middleCols(off, idx(dk));
    Mat<T> qv = qu;
    for (std::size_t j = 0; j < dk; ++j) {
      qu.col(idx(j)).array() += u.data[head * dk + j];
      qv.col(idx(j)).array() += vb.data[head * dk + j];
    }
    Mat<T> scores = qu * k.middleCols(off, idx(dk)).transpose();
    const Mat<T> bd_full = qv * pe.middleCols(off, idx(dk)).transpose();  // T x (2T-1)
    for (std::size_t i = 0; i < frames; ++i) {
      for (std::size_t j = 0; j < frames; ++j) {
        scores(idx(i), idx(j)) = (scores(idx(i), idx(j)) + bd_full(idx(i), idx(frames - 1 - i + j))) * scale;
      }
    }
    softmax_rows_inplace(scores);
    if (trace) {
      Mat<double> m(scores.rows(), scores.cols());
      for (Index i = 0; i < scores.size(); ++i) m.data()[i] = value_of(scores.data()[i]);
      trace->maps.push_back(std::move(m));
    }
    ctx.middleCols(off, idx(dk)).noalias() = scores * v.middleCols(off, idx(dk));
  }
  return linear(ctx, w.get(p + ".linear_out.weight"), bias_of(w, p + ".linear_out"));
}

}  // namespace detail

/// Noisy log-mel (T x n_mels) plus optional mouth-ROI clip -> predicted
/// clean log-mel (T x n_mels).
template <class T>
Mat<T> enhancer_forward(const Mat<T>& mel, const visual::VideoClip* clip, const BasicTensorBundle<T>& w,
                        const EnhancerConfig& c, AttentionTrace* trace = nullptr,
                        double audio_fps = kAudioFrameRate) {
  using std::sqrt;
  c.validate();
  if (static_cast<std::size_t>(mel.cols()) != c.n_mels || mel.rows() < 1) {
    throw Error(Errc::kShapeMismatch, "enhancer: expected T x " + std::to_string(c.n_mels) + " mel input, got " +
                                          std::to_string(mel.rows()) + " x " + std::to_string(mel.cols()));
  }
  if (c.use_video && !clip) throw Error(Errc::kShapeMismatch, "enhancer: audio-visual model needs a video clip");
  const std::size_t frames = static_cast<std::size_t>(mel.rows());
  const Mat<T> audio = linear(mel, w.get("audio_proj.weight"), detail::bias_of(w, "audio_proj"));

  Mat<T> fused = audio;
  if (c.use_video) {
    const Mat<T> vis = visual_encode(*clip, w, c);
    const auto map = visual::align_indices(frames, clip->n_frames, audio_fps, clip->fps);
    fused.resize(idx(frames), idx(c.audio_feat_dim + c.visual_feat_dim));
    fused.leftCols(idx(c.audio_feat_dim)) = audio;
    for (std::size_t t = 0; t < frames; ++t) fused.row(idx(t)).tail(idx(c.visual_feat_dim)) = vis.row(idx(map[t]));
  }

  Mat<T> x = linear(fused, w.get("embed.weight"), detail::bias_of(w, "embed"));
  x *= T(std::sqrt(static_cast<double>(c.attn_dim)));
  const Mat<T> pos = relative_positions(frames, c.attn_dim).template cast<T>();

  for (std::size_t l = 0; l < c.n_layers; ++l) {
    const std::string p = "layers." + std::to_string(l);
    Mat<T> h = layer_norm(x, w.get(p + ".norm1.weight"), w.get(p + ".norm1.bias"));
    x += detail::rel_attention(h, pos, w, p + ".attn", c, trace);
    h = layer_norm(x, w.get(p + ".norm2.weight"), w.get(p + ".norm2.bias"));
    Mat<T> f = linear(h, w.get(p + ".ff.w1.weight"), detail::bias_of(w, p + ".ff.w1"));
    for (Index i = 0; i < f.size(); ++i) f.data()[i] = gelu(f.data()[i]);
    x += linear(f, w.get(p + ".ff.w2.weight"), detail::bias_of(w, p + ".ff.w2"));
  }
  x = layer_norm(x, w.get("after_norm.weight"), w.get("after_norm.bias"));
  Mat<T> out = linear(x, w.get("decoder.weight"), detail::bias_of(w, "decoder"));
  require_finite(out, "enhancer output");
  return out;
}

/// Validates the bundle against the config's manifest first.
template <class T>
Mat<T> enhance(const Mat<T>& mel, const visual::VideoClip* clip, const BasicTensorBundle<T>& w,
               const EnhancerConfig& c) {
  enhancer_manifest(c).validate(w);
  return enhancer_forward(mel, clip, w, c);
}

}  // namespace lavoce::nn
