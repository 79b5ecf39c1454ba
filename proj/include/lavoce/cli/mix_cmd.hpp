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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lavoce/cli/common.hpp"
#include "lavoce/corrupt/manifest.hpp"
#include "lavoce/corrupt/mix.hpp"
#include "lavoce/corrupt/recipe.hpp"
#include "lavoce/dsp/synth.hpp"
#include "lavoce/dsp/wav.hpp"

namespace lavoce::cli {

struct MixOptions {
  std::string manifest;           ///< empty with `synthetic` > 0
  std::optional<int> condition;   ///< overrides ratios and source counts
  std::size_t synthetic = 0;      ///< generated utterances instead of a manifest
  double synthetic_seconds = 2.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::size_t jobs = 1;
};

struct MixedUtterance {
  std::string id;
  std::filesystem::path noisy, clean;
  corrupt::MixRecipe recipe;
  double noise_gain = 0.0, interference_gain = 0.0;
  double measured_snr_db = 0.0, measured_sir_db = 0.0;
};

namespace detail {

struct Sources {
  std::string label;
  std::size_t line = 0;
  dsp::Waveform clean;
  std::vector<dsp::Waveform> noises, interferers;
  corrupt::MixRecipe recipe;
  nlohmann::json provenance;
};

inline std::string utterance_id(std::size_t index, const std::string& label) {
  std::string n = std::to_string(index);
  return std::string(n.size() < 4 ? 4 - n.size() : 0, '0') + n + "_" + label;
}

inline dsp::Waveform load_source(const std::string& path, std::size_t line) {
  try {
    return dsp::load_wav(path);
  } catch (const Error& e) {
    throw Error(e.code(), "manifest line " + std::to_string(line) + ": " + path + ": " + e.what());
  }
}

inline Sources manifest_sources(const corrupt::ManifestEntry& e, const MixOptions& o) {
  Sources s;
  s.line = e.line;
  s.label = std::filesystem::path(e.clean).stem().string();
  s.recipe = e.recipe;
  std::vector<std::string> noises = e.noises, interferers = e.interferers;
  if (o.condition) {
    s.recipe = corrupt::preset_condition(*o.condition);
    Rng rng(mix_seed(o.seed, e.line));
    try {
      noises = corrupt::draw_from_pool(e.noises, s.recipe.n_noises, rng);
      interferers = corrupt::draw_from_pool(e.interferers, s.recipe.n_interferers, rng);
    } catch (const Error& err) {
      throw Error(err.code(), "manifest line " + std::to_string(e.line) + ": " + err.what());
    }
  }
  s.recipe.seed = mix_seed(o.seed, e.recipe.seed);
  s.clean = load_source(e.clean, e.line);
  for (const auto& p : noises) s.noises.push_back(load_source(p, e.line));
  for (const auto& p : interferers) s.interferers.push_back(load_source(p, e.line));
  s.provenance = {{"line", e.line}, {"clean", e.clean}, {"noises", noises}, {"interferers", interferers}};
  return s;
}

/// Speech-like clean and interferers, white noises of varied level.
inline Sources synthetic_sources(std::size_t index, const MixOptions& o) {
  Sources s;
  s.label = "synthetic";
  s.recipe = corrupt::preset_condition(*o.condition, mix_seed(o.seed, index));
  const auto n = static_cast<std::size_t>(o.synthetic_seconds * dsp::kDefaultSampleRate);
  const std::uint64_t base = mix_seed(o.seed, 1000 + index);
  s.clean = dsp::speech_like(n, mix_seed(base, 0));
  for (int k = 0; k < s.recipe.n_noises; ++k) {
    s.noises.push_back(dsp::white_noise(n, mix_seed(base, 100 + k), 0.05 * (1 + k)));
  }
  for (int k = 0; k < s.recipe.n_interferers; ++k) s.interferers.push_back(dsp::speech_like(n, mix_seed(base, 200 + k)));
  s.provenance = {{"synthetic_index", index}};
  return s;
}

}  // namespace detail

/// Writes <id>_noisy.wav and <id>_clean.wav per utterance plus mix_log.json.
inline std::vector<MixedUtterance> cmd_mix(const MixOptions& o) {
  if (o.manifest.empty() == (o.synthetic == 0)) throw UsageError("mix: give exactly one of --manifest or --synthetic");
  if (o.synthetic > 0 && !o.condition) throw UsageError("mix: --synthetic needs --condition");
  if (o.condition) corrupt::preset_condition(*o.condition);
  if (o.out_dir.empty()) throw UsageError("mix: --out-dir is required");

  std::vector<corrupt::ManifestEntry> entries;
  if (!o.manifest.empty()) entries = corrupt::load_manifest(o.manifest);
  const std::size_t n = o.manifest.empty() ? o.synthetic : entries.size();
  std::filesystem::create_directories(o.out_dir);

  std::vector<MixedUtterance> out(n);
  std::vector<nlohmann::json> log(n);
  parallel_for(n, o.jobs, [&](std::size_t i) {
    auto src = o.manifest.empty() ? detail::synthetic_sources(i, o) : detail::manifest_sources(entries[i], o);
    const auto r = corrupt::mix(src.clean, src.noises, src.interferers, src.recipe);
    MixedUtterance u;
    u.id = detail::utterance_id(i, src.label);
    u.noisy = std::filesystem::path(o.out_dir) / (u.id + "_noisy.wav");
    u.clean = std::filesystem::path(o.out_dir) / (u.id + "_clean.wav");
    dsp::save_wav(u.noisy.string(), r.noisy);
    dsp::save_wav(u.clean.string(), r.clean);
    u.recipe = src.recipe;
    u.noise_gain = r.noise_gain;
    u.interference_gain = r.interference_gain;
    u.measured_snr_db = r.measured_snr_db;
    u.measured_sir_db = r.measured_sir_db;
    log[i] = {{"id", u.id},
              {"source", src.provenance},
              {"n_noises", u.recipe.n_noises},
              {"n_interferers", u.recipe.n_interferers},
              {"target_snr_db", u.recipe.snr_db},
              {"target_sir_db", u.recipe.sir_db},
              {"mix_seed", u.recipe.seed},
              {"noise_gain", u.noise_gain},
              {"interference_gain", u.interference_gain},
              {"measured_snr_db", finite_or_null(u.measured_snr_db)},
              {"measured_sir_db", finite_or_null(u.measured_sir_db)}};
    out[i] = std::move(u);
  });

  nlohmann::json config = {{"manifest", o.manifest}, {"synthetic", o.synthetic}};
  config["condition"] = o.condition ? nlohmann::json(*o.condition) : nlohmann::json();
  nlohmann::json doc = run_meta("mix", o.seed, config);
  doc["utterances"] = log;
  std::ofstream(std::filesystem::path(o.out_dir) / "mix_log.json") << doc.dump(2) << '\n';
  return out;
}

}  // namespace lavoce::cli
