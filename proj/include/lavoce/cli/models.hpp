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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "lavoce/cli/common.hpp"
#include "lavoce/nn/config.hpp"
#include "lavoce/nn/manifest.hpp"
#include "lavoce/nn/weights_io.hpp"

namespace lavoce::cli {

struct InitOptions {
  std::string model = "enhancer";  ///< enhancer | vocoder | discriminator
  std::string config = "toy";      ///< toy | full | micro (enhancer) | path to JSON
  std::uint64_t seed = 0;
  std::string out;
};

namespace detail {

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseFailure, path + ": " + e.what());
  }
}

inline nlohmann::json named_config(const std::string& model, const std::string& name) {
  if (model == "enhancer") {
    if (name == "toy") return nn::to_json(nn::EnhancerConfig::toy());
    if (name == "full") return nn::to_json(nn::EnhancerConfig::full());
    if (name == "micro") return nn::to_json(nn::EnhancerConfig::micro());
    return nn::to_json(nn::enhancer_config_from_json(read_json_file(name)));
  }
  if (model == "vocoder" || model == "discriminator") {
    if (name == "toy") return nn::to_json(nn::VocoderConfig::toy());
    if (name == "full") return nn::to_json(nn::VocoderConfig::full());
    return nn::to_json(nn::vocoder_config_from_json(read_json_file(name)));
  }
  throw UsageError("unknown model '" + model + "' (expected enhancer, vocoder or discriminator)");
}

inline nn::ShapeManifest manifest_for(const std::string& model, const nlohmann::json& config) {
  if (model == "enhancer") return nn::enhancer_manifest(nn::enhancer_config_from_json(config));
  const auto c = nn::vocoder_config_from_json(config);
  return model == "vocoder" ? nn::vocoder_manifest(c) : nn::discriminator_manifest(c);
}

}  // namespace detail

/// Seeded weights plus a sidecar {model, config, seed, version}.
inline nlohmann::json cmd_init_weights(const InitOptions& o) {
  if (o.out.empty()) throw UsageError("init-weights: --out is required");
  const auto config = detail::named_config(o.model, o.config);
  const auto m = detail::manifest_for(o.model, config);
  const auto w = nn::init_weights(m, o.seed);
  nlohmann::json sidecar = run_meta("init-weights", o.seed, config);
  sidecar["model"] = o.model;
  sidecar["trainable_parameters"] = m.trainable_count();
  if (const auto dir = std::filesystem::path(o.out).parent_path(); !dir.empty()) std::filesystem::create_directories(dir);
  nn::save_weights(o.out, w, sidecar);
  return sidecar;
}

template <class Config>
struct LoadedModel {
  Config config;
  nn::TensorBundle weights;
  nlohmann::json sidecar;
};

/// Loads weights and their sidecar, then checks every tensor against the
/// manifest of the recorded config.
inline nlohmann::json checked_sidecar(const std::string& path, const std::string& model) {
  auto sidecar = nn::load_sidecar(path);
  const auto kind = sidecar.value("model", std::string());
  if (kind != model) {
    throw Error(Errc::kShapeManifestMismatch, path + ": sidecar declares model '" + kind + "', expected " + model);
  }
  if (!sidecar.contains("config")) throw Error(Errc::kParseFailure, nn::sidecar_path(path) + ": no config");
  return sidecar;
}

inline LoadedModel<nn::EnhancerConfig> load_enhancer(const std::string& path) {
  auto sidecar = checked_sidecar(path, "enhancer");
  LoadedModel<nn::EnhancerConfig> m{nn::enhancer_config_from_json(sidecar["config"]), nn::load_weights(path), sidecar};
  nn::enhancer_manifest(m.config).validate(m.weights);
  return m;
}

inline LoadedModel<nn::VocoderConfig> load_vocoder(const std::string& path) {
  auto sidecar = checked_sidecar(path, "vocoder");
  LoadedModel<nn::VocoderConfig> m{nn::vocoder_config_from_json(sidecar["config"]), nn::load_weights(path), sidecar};
  nn::vocoder_manifest(m.config).validate(m.weights);
  return m;
}

}  // namespace lavoce::cli
