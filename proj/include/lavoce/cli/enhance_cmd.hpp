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

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"

#include "lavoce/cli/common.hpp"
#include "lavoce/cli/models.hpp"
#include "lavoce/dsp/inversion.hpp"
#include "lavoce/dsp/mel.hpp"
#include "lavoce/dsp/melf.hpp"
#include "lavoce/dsp/wav.hpp"
#include "lavoce/nn/enhancer.hpp"
#include "lavoce/nn/vocoder.hpp"
#include "lavoce/visual/video_clip.hpp"

namespace lavoce::cli {

enum class Inversion { kVocoder, kGriffinLim, kNoisyPhase };

inline Inversion parse_inversion(const std::string& s) {
  if (s == "vocoder") return Inversion::kVocoder;
  if (s == "griffin-lim") return Inversion::kGriffinLim;
  if (s == "noisy-phase") return Inversion::kNoisyPhase;
  throw UsageError("unknown inversion '" + s + "' (expected vocoder, griffin-lim or noisy-phase)");
}

inline const char* to_string(Inversion m) {
  switch (m) {
    case Inversion::kVocoder: return "vocoder";
    case Inversion::kGriffinLim: return "griffin-lim";
    case Inversion::kNoisyPhase: return "noisy-phase";
  }
  return "?";
}

struct EnhanceOptions {
  std::string audio;
  std::string video;
  std::string weights;
  std::string vocoder_weights;
  std::string output;
  bool wav_out = true;  ///< false: write the predicted mel only
  Inversion invert = Inversion::kVocoder;
  std::size_t iters = dsp::kDefaultGriffinLimIters;
  dsp::MelInverse mel_inverse = dsp::MelInverse::kPseudoInverse;
};

struct EnhanceResult {
  dsp::MelSpectrogram mel;
  std::optional<dsp::Waveform> wav;
  std::filesystem::path mel_path;
  nlohmann::json log;
};

namespace detail {

inline nn::Mat<double> to_matrix(const dsp::MelSpectrogram& m) {
  nn::Mat<double> x(nn::idx(m.n_frames), nn::idx(m.n_mels));
  for (std::size_t t = 0; t < m.n_frames; ++t) {
    for (std::size_t b = 0; b < m.n_mels; ++b) x(nn::idx(t), nn::idx(b)) = m.at(t, b);
  }
  return x;
}

inline dsp::MelSpectrogram from_matrix(const nn::Mat<double>& x, const dsp::AudioParams& p) {
  dsp::MelSpectrogram m{static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()), {}, p};
  m.data.resize(m.n_frames * m.n_mels);
  for (std::size_t t = 0; t < m.n_frames; ++t) {
    for (std::size_t b = 0; b < m.n_mels; ++b) m.at(t, b) = x(nn::idx(t), nn::idx(b));
  }
  return m;
}

}  // namespace detail

/// Vocoder output keeps its 256-samples-per-frame length; the STFT-based
/// inversions follow the istft cropping of the noisy input.
inline dsp::Waveform invert_mel(const dsp::MelSpectrogram& mel, const dsp::Waveform& noisy, const EnhanceOptions& o,
                                nlohmann::json& log) {
  switch (o.invert) {
    case Inversion::kVocoder: {
      const auto voc = load_vocoder(o.vocoder_weights);
      if (voc.config.n_mels != mel.n_mels || voc.config.hop != mel.params.hop) {
        throw Error(Errc::kShapeMismatch, "vocoder expects " + std::to_string(voc.config.n_mels) + " mels at hop " +
                                              std::to_string(voc.config.hop));
      }
      log["vocoder_config_hash"] = config_hash(voc.sidecar["config"]);
      return {nn::vocoder_forward(detail::to_matrix(mel), voc.weights, voc.config), mel.params.sample_rate};
    }
    case Inversion::kGriffinLim:
      return dsp::griffin_lim_magnitudes(dsp::mel_to_linear(mel, o.mel_inverse), mel.params, o.iters).waveform;
    case Inversion::kNoisyPhase:
      return dsp::phase_invert(dsp::mel_to_linear(mel, o.mel_inverse), noisy, mel.params);
  }
  throw UsageError("inversion method");
}

/// Noisy WAV (+ mouth ROI) -> predicted log-mel, optionally inverted to a
/// waveform. Writes the MELF (and WAV) plus <output>.log.json.
inline EnhanceResult cmd_enhance(const EnhanceOptions& o) {
  if (o.audio.empty() || o.weights.empty() || o.output.empty()) {
    throw UsageError("enhance: --audio, --weights and --out-path are required");
  }
  if (o.wav_out && o.invert == Inversion::kVocoder && o.vocoder_weights.empty()) {
    throw UsageError("enhance: --invert vocoder needs --vocoder-weights");
  }
  const auto enh = load_enhancer(o.weights);
  if (enh.config.use_video && o.video.empty()) {
    throw UsageError("enhance: the audio-visual model needs --video");
  }
  const dsp::AudioParams p;
  const auto noisy = dsp::load_wav(o.audio, p.sample_rate);
  const auto noisy_mel = dsp::log_mel(noisy, p);
  if (noisy_mel.n_mels != enh.config.n_mels) {
    throw Error(Errc::kShapeMismatch, "enhancer expects " + std::to_string(enh.config.n_mels) + " mel bands");
  }
  std::optional<visual::VideoClip> clip;
  if (enh.config.use_video) clip = visual::load_roi(o.video);
  const auto pred = nn::enhancer_forward(detail::to_matrix(noisy_mel), clip ? &*clip : nullptr, enh.weights, enh.config);

  EnhanceResult r;
  r.mel = detail::from_matrix(pred, p);
  nlohmann::json config = {{"enhancer", enh.sidecar["config"]},
                           {"output", o.wav_out ? "wav" : "mel"},
                           {"invert", to_string(o.invert)},
                           {"iters", o.iters},
                           {"mel_inverse", o.mel_inverse == dsp::MelInverse::kPseudoInverse ? "pinv" : "nnls"}};
  r.log = run_meta("enhance", enh.sidecar.value("seed", std::uint64_t{0}), config);
  r.log["audio"] = o.audio;
  r.log["video"] = o.video;
  r.log["frames"] = r.mel.n_frames;

  const std::filesystem::path out(o.output);
  if (!out.parent_path().empty()) std::filesystem::create_directories(out.parent_path());
  r.mel_path = o.wav_out ? std::filesystem::path(out).replace_extension(".melf") : out;
  dsp::save_melf(r.mel_path.string(), r.mel);
  if (o.wav_out) {
    r.wav = invert_mel(r.mel, noisy, o, r.log);
    dsp::save_wav(out.string(), *r.wav);
    r.log["samples"] = r.wav->size();
  }
  std::ofstream(out.string() + ".log.json") << r.log.dump(2) << '\n';
  return r;
}

}  // namespace lavoce::cli
