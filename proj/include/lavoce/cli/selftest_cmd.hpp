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
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "lavoce/cli/common.hpp"
#include "lavoce/cli/models.hpp"
#include "lavoce/corrupt/mix.hpp"
#include "lavoce/corrupt/recipe.hpp"
#include "lavoce/dsp/inversion.hpp"
#include "lavoce/dsp/stft.hpp"
#include "lavoce/dsp/synth.hpp"
#include "lavoce/metrics/spectral.hpp"
#include "lavoce/metrics/stoi.hpp"
#include "lavoce/nn/enhancer.hpp"
#include "lavoce/nn/gradcheck.hpp"
#include "lavoce/nn/losses.hpp"
#include "lavoce/nn/manifest.hpp"
#include "lavoce/nn/weights_io.hpp"

namespace lavoce::cli {

struct SelftestOptions {
  std::string filter;   ///< substring of the suite name; empty runs all
  std::string weights;  ///< optional weight file to verify
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline void check(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::kInvalidArgument, what);
}

inline std::string suite_stft() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto x = dsp::white_noise(16000, s, 0.3);
    const auto y = dsp::istft(dsp::stft(x, {}));
    check(y.size() + dsp::AudioParams{}.hop > x.size(), "istft length " + std::to_string(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(x.samples[i] - y.samples[i]));
  }
  check(worst < 1e-6, "istft(stft(x)) error " + sci(worst));
  return "max error " + sci(worst);
}

inline std::string suite_griffin_lim() {
  for (std::uint64_t s = 0; s < 2; ++s) {
    const auto x = dsp::speech_like(8000, s);
    const auto c = dsp::griffin_lim_magnitudes(dsp::magnitudes(dsp::stft(x, {})), {}, 16).convergence;
    for (std::size_t i = 1; i < c.size(); ++i) check(c[i] <= c[i - 1] + 1e-12, "spectral convergence increased");
  }
  return "convergence non-increasing";
}

inline std::string suite_mixing() {
  double worst = 0.0;
  for (int cond = 1; cond <= 3; ++cond) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto recipe = corrupt::preset_condition(cond, s);
      const std::size_t n = 8000;
      std::vector<dsp::Waveform> noises, talkers;
      for (int k = 0; k < recipe.n_noises; ++k) noises.push_back(dsp::white_noise(n / 2, mix_seed(s, k), 0.1));
      for (int k = 0; k < recipe.n_interferers; ++k) talkers.push_back(dsp::speech_like(n + 999, mix_seed(s, 50 + k)));
      const auto r = corrupt::mix(dsp::speech_like(n, s), noises, talkers, recipe);
      worst = std::max({worst, std::abs(r.measured_snr_db - recipe.snr_db), std::abs(r.measured_sir_db - recipe.sir_db)});
    }
  }
  check(worst <= 0.01, "ratio error " + sci(worst) + " dB");
  return "max ratio error " + sci(worst) + " dB";
}

inline std::string suite_metrics() {
  const auto x = dsp::speech_like(16000, 3);
  check(metrics::mcd(x, x) == 0.0 && metrics::spec_mse(x, x) == 0.0, "MCD/Spec.MSE of identical signals");
  const double s = metrics::stoi(x, x), e = metrics::estoi(x, x);
  check(s >= 0.999 && e >= 0.999, "STOI/ESTOI of identical signals below 0.999");
  return "identities hold";
}

inline std::string suite_param_counts() {
  const auto n = nn::vocoder_manifest(nn::VocoderConfig::full()).trainable_count();
  check(std::abs(static_cast<double>(n) - 13.92e6) <= 0.01 * 13.92e6, "vocoder count " + std::to_string(n));
  return "vocoder " + std::to_string(n) + " trainable";
}

inline std::string suite_losses() {
  const auto w = dsp::speech_like(4096, 5).samples;
  std::vector<nn::DiscOutput<double>> ones(8, {{1.0, 1.0}, {{0.5}}}), zeros(8, {{0.0, 0.0}, {{0.5}}});
  const auto g0 = nn::generator_loss<double>(w, w, ones, ones);
  const auto g8 = nn::generator_loss<double>(w, w, zeros, zeros);
  check(std::abs(g0.total) <= 1e-12 && std::abs(g8.total - 8.0) <= 1e-12, "generator loss identities");
  check(std::abs(nn::discriminator_loss(ones, zeros)) <= 1e-12 && std::abs(nn::discriminator_loss(zeros, ones) - 16.0) <= 1e-12,
        "discriminator loss identities");
  return "0 / 8 / 0 / 16";
}

inline std::string suite_gradcheck() {
  const auto cfg = nn::EnhancerConfig::micro();
  const auto w = nn::init_weights(nn::enhancer_manifest(cfg), 11);
  nn::Mat<double> noisy = nn::Mat<double>::Constant(6, nn::idx(cfg.n_mels), -2.0), clean = noisy;
  for (nn::Index i = 0; i < noisy.size(); ++i) {
    noisy.data()[i] += std::sin(0.7 * static_cast<double>(i));
    clean.data()[i] += 0.5 * std::cos(0.3 * static_cast<double>(i));
  }
  auto loss = [&](const auto& b) {
    using T = typename std::remove_cvref_t<decltype(b)>::value_type;
    return nn::enhancer_loss<T>(nn::enhancer_forward<T>(noisy.template cast<T>(), nullptr, b, cfg), clean.template cast<T>());
  };
  const double err = nn::finite_diff_gradcheck(loss, w, 8, 12).max_rel_error;
  check(err < 1e-4, "max relative error " + sci(err));
  return "max relative error " + sci(err);
}

inline std::string suite_weights(const std::string& path) {
  const auto b = nn::init_weights(nn::enhancer_manifest(nn::EnhancerConfig::micro()), 13);
  check(nn::decode_lvwt(nn::encode_lvwt(b)) == b, "LVWT round trip");
  if (path.empty()) return "in-memory round trip";
  const auto kind = nn::load_sidecar(path).value("model", std::string());
  if (kind == "enhancer") {
    load_enhancer(path);
  } else if (kind == "vocoder") {
    load_vocoder(path);
  } else {
    nn::discriminator_manifest(nn::vocoder_config_from_json(checked_sidecar(path, kind)["config"]))
        .validate(nn::load_weights(path));
  }
  return path + " matches its " + kind + " manifest";
}

}  // namespace detail

/// Runs the invariant suites whose name contains `filter`; one line each.
inline std::vector<SuiteResult> cmd_selftest(const SelftestOptions& o, std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<std::string()>>> suites{
      {"dsp.stft-roundtrip", detail::suite_stft},
      {"dsp.griffin-lim", detail::suite_griffin_lim},
      {"corrupt.mixing", detail::suite_mixing},
      {"metrics.identities", detail::suite_metrics},
      {"nn.param-counts", detail::suite_param_counts},
      {"nn.loss-identities", detail::suite_losses},
      {"nn.gradcheck", detail::suite_gradcheck},
      {"nn.weights", [&] { return detail::suite_weights(o.weights); }},
  };
  std::vector<SuiteResult> results;
  for (const auto& [name, fn] : suites) {
    if (!o.filter.empty() && name.find(o.filter) == std::string::npos) continue;
    SuiteResult r{name, false, {}};
    try {
      r.detail = fn();
      r.passed = true;
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    out << (r.passed ? "PASS " : "FAIL ") << name << ": " << r.detail << '\n';
    results.push_back(std::move(r));
  }
  if (results.empty()) throw UsageError("selftest: no suite matches '" + o.filter + "'");
  return results;
}

}  // namespace lavoce::cli
