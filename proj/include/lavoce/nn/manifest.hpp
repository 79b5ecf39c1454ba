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
#include <cstdint>
#include <random>
#include <string>

#include "lavoce/core/random.hpp"
#include "lavoce/nn/config.hpp"
#include "lavoce/nn/tensor.hpp"

namespace lavoce::nn {

namespace detail {

inline void add_linear(ShapeManifest& m, const std::string& name, std::size_t out, std::size_t in, bool bias = true) {
  m.add(name + ".weight", {out, in}, ParamKind::kLinearWeight, in);
  if (bias) m.add(name + ".bias", {out}, ParamKind::kBias, in);
}

inline void add_norm(ShapeManifest& m, const std::string& name, std::size_t d) {
  m.add(name + ".weight", {d}, ParamKind::kOnes);
  m.add(name + ".bias", {d}, ParamKind::kZeros);
}

inline void add_batch_norm(ShapeManifest& m, const std::string& name, std::size_t c) {
  add_norm(m, name, c);
  m.add(name + ".running_mean", {c}, ParamKind::kRunningMean);
  m.add(name + ".running_var", {c}, ParamKind::kRunningVar);
}

inline void add_conv(ShapeManifest& m, const std::string& name, Shape w, bool bias = true) {
  std::size_t fan_in = 1;
  for (std::size_t i = 1; i < w.size(); ++i) fan_in *= w[i];
  const std::size_t c_out = w[0];
  m.add(name + ".weight", std::move(w), ParamKind::kConvWeight, fan_in);
  if (bias) m.add(name + ".bias", {c_out}, ParamKind::kBias, fan_in);
}

}  // namespace detail

inline constexpr std::size_t kResNetStages = 4;

/// 3D stem + ResNet-18 trunk. Widths are visual_feat_dim / 8, /4, /2, /1.
inline void add_visual_encoder(ShapeManifest& m, const EnhancerConfig& c) {
  const std::size_t c0 = c.visual_feat_dim / 8;
  detail::add_conv(m, "visual.stem.conv", {c0, 1, 5, 7, 7}, false);
  detail::add_batch_norm(m, "visual.stem.bn", c0);
  std::size_t in = c0;
  for (std::size_t s = 0; s < kResNetStages; ++s) {
    const std::size_t w = c0 << s;
    for (std::size_t b = 0; b < 2; ++b) {
      const std::string p = "visual.trunk.layer" + std::to_string(s + 1) + "." + std::to_string(b);
      const std::size_t block_in = b == 0 ? in : w;
      detail::add_conv(m, p + ".conv1", {w, block_in, 3, 3}, false);
      detail::add_batch_norm(m, p + ".bn1", w);
      detail::add_conv(m, p + ".conv2", {w, w, 3, 3}, false);
      detail::add_batch_norm(m, p + ".bn2", w);
      if (b == 0 && (s > 0 || block_in != w)) {
        detail::add_conv(m, p + ".downsample.conv", {w, block_in, 1, 1}, false);
        detail::add_batch_norm(m, p + ".downsample.bn", w);
      }
    }
    in = w;
  }
}

inline ShapeManifest enhancer_manifest(const EnhancerConfig& c) {
  c.validate();
  ShapeManifest m;
  const std::size_t d = c.attn_dim;
  detail::add_linear(m, "audio_proj", c.audio_feat_dim, c.n_mels);
  if (c.use_video) add_visual_encoder(m, c);
  detail::add_linear(m, "embed", d, c.audio_feat_dim + (c.use_video ? c.visual_feat_dim : 0));
  for (std::size_t l = 0; l < c.n_layers; ++l) {
    const std::string p = "layers." + std::to_string(l);
    detail::add_norm(m, p + ".norm1", d);
    for (const char* proj : {"linear_q", "linear_k", "linear_v", "linear_out"}) {
      detail::add_linear(m, p + ".attn." + proj, d, d);
    }
    detail::add_linear(m, p + ".attn.linear_pos", d, d, false);
    m.add(p + ".attn.pos_bias_u", {c.n_heads, c.head_dim()}, ParamKind::kPosBias, c.head_dim());
    m.add(p + ".attn.pos_bias_v", {c.n_heads, c.head_dim()}, ParamKind::kPosBias, c.head_dim());
    detail::add_norm(m, p + ".norm2", d);
    detail::add_linear(m, p + ".ff.w1", c.ff_dim, d);
    detail::add_linear(m, p + ".ff.w2", d, c.ff_dim);
  }
  detail::add_norm(m, "after_norm", d);
  detail::add_linear(m, "decoder", c.n_mels, d);
  return m;
}

/// Generator only (what ships for inference).
inline ShapeManifest vocoder_manifest(const VocoderConfig& c) {
  c.validate();
  ShapeManifest m;
  detail::add_conv(m, "conv_pre", {c.initial_channels, c.n_mels, 7});
  const std::size_t nk = c.resblock_kernels.size();
  for (std::size_t i = 0; i < c.upsample_rates.size(); ++i) {
    const std::size_t in = c.initial_channels >> i, out = c.stage_channels(i);
    // transposed conv weights are [C_in, C_out, K]; fan-in follows torch's convention
    m.add("ups." + std::to_string(i) + ".weight", {in, out, c.upsample_kernels[i]}, ParamKind::kConvWeight,
          out * c.upsample_kernels[i]);
    m.add("ups." + std::to_string(i) + ".bias", {out}, ParamKind::kBias, out * c.upsample_kernels[i]);
    for (std::size_t j = 0; j < nk; ++j) {
      const std::string p = "resblocks." + std::to_string(i * nk + j);
      for (std::size_t n = 0; n < c.resblock_dilations[j].size(); ++n) {
        detail::add_conv(m, p + ".convs1." + std::to_string(n), {out, out, c.resblock_kernels[j]});
        detail::add_conv(m, p + ".convs2." + std::to_string(n), {out, out, c.resblock_kernels[j]});
      }
    }
  }
  detail::add_conv(m, "conv_post", {1, c.stage_channels(c.upsample_rates.size() - 1), 7});
  return m;
}

inline constexpr std::size_t kMpdPostKernel = 3;
inline constexpr std::size_t kMsdPostKernel = 3;

inline ShapeManifest discriminator_manifest(const VocoderConfig& c) {
  c.validate();
  ShapeManifest m;
  for (std::size_t i = 0; i < c.mpd_periods.size(); ++i) {
    const std::string p = "mpd." + std::to_string(i);
    std::size_t in = 1;
    for (std::size_t l = 0; l < c.mpd_channels.size(); ++l) {
      detail::add_conv(m, p + ".convs." + std::to_string(l), {c.mpd_channels[l], in, c.mpd_kernel, 1});
      in = c.mpd_channels[l];
    }
    detail::add_conv(m, p + ".conv_post", {1, in, kMpdPostKernel, 1});
  }
  for (std::size_t i = 0; i < c.msd_scales; ++i) {
    const std::string p = "msd." + std::to_string(i);
    std::size_t in = 1;
    for (std::size_t l = 0; l < c.msd_channels.size(); ++l) {
      detail::add_conv(m, p + ".convs." + std::to_string(l), {c.msd_channels[l], in / c.msd_groups[l], c.msd_kernels[l]});
      in = c.msd_channels[l];
    }
    detail::add_conv(m, p + ".conv_post", {1, in, kMsdPostKernel});
  }
  return m;
}

/// Seeded initialization; every value is representable in f32 so a
/// save/load cycle through LVWT is lossless.
inline TensorBundle init_weights(const ShapeManifest& m, std::uint64_t seed) {
  Rng rng(seed);
  TensorBundle b;
  std::normal_distribution<double> conv(0.0, 0.01);
  for (const auto& e : m.entries) {
    Tensor t(e.shape);
    const double bound = 1.0 / std::sqrt(static_cast<double>(e.fan_in));
    std::uniform_real_distribution<double> uni(-bound, bound);
    for (double& v : t.data) {
      switch (e.kind) {
        case ParamKind::kConvWeight: v = conv(rng); break;
        case ParamKind::kLinearWeight:
        case ParamKind::kBias:
        case ParamKind::kPosBias: v = uni(rng); break;
        case ParamKind::kOnes:
        case ParamKind::kRunningVar: v = 1.0; break;
        case ParamKind::kZeros:
        case ParamKind::kRunningMean: v = 0.0; break;
      }
      v = static_cast<double>(static_cast<float>(v));
    }
    b.add(e.name, std::move(t));
  }
  return b;
}

}  // namespace lavoce::nn
