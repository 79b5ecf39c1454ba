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
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "lavoce/core/error.hpp"

namespace lavoce::nn {

namespace detail {

/// Rejects keys outside `allowed`, then reads each present key into its field.
class StrictReader {
 public:
  StrictReader(const nlohmann::json& j, std::string what, std::set<std::string> allowed) : j_(j), what_(std::move(what)) {
    if (!j.is_object()) throw Error(Errc::kInvalidArgument, what_ + ": expected a JSON object");
    for (const auto& [k, v] : j.items()) {
      if (!allowed.count(k)) throw Error(Errc::kInvalidArgument, what_ + ": unknown key '" + k + "'");
    }
  }

  template <class V>
  void read(const char* key, V& field) const {
    if (!j_.contains(key)) return;
    try {
      field = j_.at(key).get<V>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kInvalidArgument, what_ + "." + key + ": " + e.what());
    }
  }

 private:
  const nlohmann::json& j_;
  std::string what_;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(Errc::kInvalidArgument, msg);
}

}  // namespace detail

struct EnhancerConfig {
  std::size_t n_layers = 12;
  std::size_t attn_dim = 768;
  std::size_t ff_dim = 3072;
  std::size_t n_heads = 12;
  std::size_t n_mels = 80;
  std::size_t audio_feat_dim = 512;
  std::size_t visual_feat_dim = 512;  ///< ResNet-18 output width; stem width is 1/8 of it
  bool use_video = true;

  static EnhancerConfig full() { return {}; }
  static EnhancerConfig toy() { return {2, 32, 64, 4, 80, 16, 64, true}; }
  /// Audio-only, one block, 300 parameters.
  static EnhancerConfig micro() { return {1, 4, 8, 1, 8, 4, 8, false}; }

  std::size_t head_dim() const { return attn_dim / n_heads; }

  void validate() const {
    detail::require(n_layers >= 1 && attn_dim >= 1 && ff_dim >= 1 && n_heads >= 1 && n_mels >= 1 &&
                        audio_feat_dim >= 1,
                    "EnhancerConfig: all dimensions must be >= 1");
    detail::require(attn_dim % n_heads == 0, "EnhancerConfig: attn_dim must be divisible by n_heads");
    detail::require(!use_video || (visual_feat_dim >= 8 && visual_feat_dim % 8 == 0),
                    "EnhancerConfig: visual_feat_dim must be a positive multiple of 8");
  }

  bool operator==(const EnhancerConfig&) const = default;
};

struct VocoderConfig {
  std::size_t n_mels = 80;
  std::vector<std::size_t> upsample_rates{8, 8, 2, 2};
  std::vector<std::size_t> upsample_kernels{16, 16, 4, 4};
  std::size_t initial_channels = 512;
  std::vector<std::size_t> resblock_kernels{3, 7, 11};
  std::vector<std::vector<std::size_t>> resblock_dilations{{1, 3, 5}, {1, 3, 5}, {1, 3, 5}};
  std::size_t hop = 256;

  std::vector<std::size_t> mpd_periods{2, 3, 5, 7, 11};
  std::vector<std::size_t> mpd_channels{32, 128, 512, 1024, 1024};
  std::size_t mpd_kernel = 5;
  std::size_t mpd_stride = 3;

  std::size_t msd_scales = 3;
  std::vector<std::size_t> msd_channels{128, 128, 256, 512, 1024, 1024, 1024};
  std::vector<std::size_t> msd_kernels{15, 41, 41, 41, 41, 41, 5};
  std::vector<std::size_t> msd_strides{1, 2, 2, 4, 4, 1, 1};
  std::vector<std::size_t> msd_groups{1, 4, 16, 16, 16, 16, 1};

  static VocoderConfig full() { return {}; }
  static VocoderConfig toy() {
    VocoderConfig c;
    c.initial_channels = 32;
    c.mpd_channels = {4, 8, 16, 16, 16};
    c.msd_channels = {8, 8, 16, 16, 16, 16, 16};
    c.msd_groups = {1, 4, 4, 4, 4, 4, 1};
    return c;
  }

  std::size_t stage_channels(std::size_t stage) const { return initial_channels >> (stage + 1); }
  std::size_t n_discriminators() const { return mpd_periods.size() + msd_scales; }

  void validate() const {
    detail::require(n_mels >= 1 && initial_channels >= 1, "VocoderConfig: dimensions must be >= 1");
    detail::require(!upsample_rates.empty() && upsample_rates.size() == upsample_kernels.size(),
                    "VocoderConfig: upsample rates and kernels must pair up");
    const std::size_t prod =
        std::accumulate(upsample_rates.begin(), upsample_rates.end(), std::size_t{1}, std::multiplies<>());
    detail::require(prod == hop, "VocoderConfig: product of upsample rates must equal the hop size");
    for (std::size_t i = 0; i < upsample_rates.size(); ++i) {
      detail::require(upsample_kernels[i] >= upsample_rates[i] && (upsample_kernels[i] - upsample_rates[i]) % 2 == 0,
                      "VocoderConfig: kernel - rate must be even and non-negative");
    }
    detail::require(stage_channels(upsample_rates.size() - 1) >= 1,
                    "VocoderConfig: too few initial channels for the number of stages");
    detail::require(!resblock_kernels.empty() && resblock_kernels.size() == resblock_dilations.size(),
                    "VocoderConfig: one dilation list per resblock kernel");
    for (std::size_t k : resblock_kernels) detail::require(k % 2 == 1, "VocoderConfig: resblock kernels must be odd");
    detail::require(!mpd_periods.empty() && !mpd_channels.empty(), "VocoderConfig: MPD needs periods and layers");
    detail::require(msd_scales >= 1, "VocoderConfig: at least one MSD scale");
    detail::require(msd_channels.size() == msd_kernels.size() && msd_channels.size() == msd_strides.size() &&
                        msd_channels.size() == msd_groups.size(),
                    "VocoderConfig: MSD layer lists must have equal length");
    std::size_t c_in = 1;
    for (std::size_t i = 0; i < msd_channels.size(); ++i) {
      detail::require(msd_groups[i] >= 1 && c_in % msd_groups[i] == 0 && msd_channels[i] % msd_groups[i] == 0,
                      "VocoderConfig: MSD group count must divide layer " + std::to_string(i) + " channels");
      c_in = msd_channels[i];
    }
  }

  bool operator==(const VocoderConfig&) const = default;
};

/// Generator loss weights: adversarial, mel L1, feature matching.
struct LossWeights {
  double adv = 1.0;
  double spec = 45.0;
  double fm = 2.0;
};

inline nlohmann::json to_json(const EnhancerConfig& c) {
  return {{"n_layers", c.n_layers},       {"attn_dim", c.attn_dim},
          {"ff_dim", c.ff_dim},           {"n_heads", c.n_heads},
          {"n_mels", c.n_mels},           {"audio_feat_dim", c.audio_feat_dim},
          {"visual_feat_dim", c.visual_feat_dim}, {"use_video", c.use_video}};
}

inline EnhancerConfig enhancer_config_from_json(const nlohmann::json& j) {
  detail::StrictReader r(j, "EnhancerConfig",
                         {"n_layers", "attn_dim", "ff_dim", "n_heads", "n_mels", "audio_feat_dim", "visual_feat_dim",
                          "use_video"});
  EnhancerConfig c;
  r.read("n_layers", c.n_layers);
  r.read("attn_dim", c.attn_dim);
  r.read("ff_dim", c.ff_dim);
  r.read("n_heads", c.n_heads);
  r.read("n_mels", c.n_mels);
  r.read("audio_feat_dim", c.audio_feat_dim);
  r.read("visual_feat_dim", c.visual_feat_dim);
  r.read("use_video", c.use_video);
  c.validate();
  return c;
}

inline nlohmann::json to_json(const VocoderConfig& c) {
  return {{"n_mels", c.n_mels},
          {"upsample_rates", c.upsample_rates},
          {"upsample_kernels", c.upsample_kernels},
          {"initial_channels", c.initial_channels},
          {"resblock_kernels", c.resblock_kernels},
          {"resblock_dilations", c.resblock_dilations},
          {"hop", c.hop},
          {"mpd_periods", c.mpd_periods},
          {"mpd_channels", c.mpd_channels},
          {"mpd_kernel", c.mpd_kernel},
          {"mpd_stride", c.mpd_stride},
          {"msd_scales", c.msd_scales},
          {"msd_channels", c.msd_channels},
          {"msd_kernels", c.msd_kernels},
          {"msd_strides", c.msd_strides},
          {"msd_groups", c.msd_groups}};
}

inline VocoderConfig vocoder_config_from_json(const nlohmann::json& j) {
  detail::StrictReader r(j, "VocoderConfig",
                         {"n_mels", "upsample_rates", "upsample_kernels", "initial_channels", "resblock_kernels",
                          "resblock_dilations", "hop", "mpd_periods", "mpd_channels", "mpd_kernel", "mpd_stride",
                          "msd_scales", "msd_channels", "msd_kernels", "msd_strides", "msd_groups"});
  VocoderConfig c;
  r.read("n_mels", c.n_mels);
  r.read("upsample_rates", c.upsample_rates);
  r.read("upsample_kernels", c.upsample_kernels);
  r.read("initial_channels", c.initial_channels);
  r.read("resblock_kernels", c.resblock_kernels);
  r.read("resblock_dilations", c.resblock_dilations);
  r.read("hop", c.hop);
  r.read("mpd_periods", c.mpd_periods);
  r.read("mpd_channels", c.mpd_channels);
  r.read("mpd_kernel", c.mpd_kernel);
  r.read("mpd_stride", c.mpd_stride);
  r.read("msd_scales", c.msd_scales);
  r.read("msd_channels", c.msd_channels);
  r.read("msd_kernels", c.msd_kernels);
  r.read("msd_strides", c.msd_strides);
  r.read("msd_groups", c.msd_groups);
  c.validate();
  return c;
}

}  // namespace lavoce::nn
