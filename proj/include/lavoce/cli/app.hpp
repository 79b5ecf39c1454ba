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
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lavoce/cli/common.hpp"
#include "lavoce/cli/enhance_cmd.hpp"
#include "lavoce/cli/eval_cmd.hpp"
#include "lavoce/cli/mix_cmd.hpp"
#include "lavoce/cli/models.hpp"
#include "lavoce/cli/selftest_cmd.hpp"
#include "lavoce/nn/micro_train.hpp"

namespace lavoce::cli {

inline std::vector<metrics::MetricId> parse_metric_list(const std::string& csv) {
  std::vector<metrics::MetricId> ids;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      ids.push_back(metrics::parse_metric(item));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (ids.empty()) throw UsageError("--metrics: empty list");
  return ids;
}

/// Entry point of the `lavoce` tool. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Audio-visual speech enhancement toolkit", "lavoce"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  MixOptions mix;
  int condition = 0;
  auto* mix_cmd = app.add_subcommand("mix", "Build noisy mixtures from a manifest or synthetic sources");
  mix_cmd->add_option("--manifest", mix.manifest, "CSV manifest (clean, noises, interferers, snr, sir, seed)");
  mix_cmd->add_option("--condition", condition, "Preset condition 1, 2 or 3 (overrides manifest ratios)");
  mix_cmd->add_option("--synthetic", mix.synthetic, "Generate this many synthetic utterances");
  mix_cmd->add_option("--seconds", mix.synthetic_seconds, "Synthetic utterance length")->capture_default_str();
  mix_cmd->add_option("--seed", mix.seed, "Seed for source alignment and pool draws")->required();
  mix_cmd->add_option("--out-dir", mix.out_dir, "Output directory")->required();
  mix_cmd->add_option("--jobs", mix.jobs, "Worker threads")->capture_default_str();

  EnhanceOptions enh;
  std::string out_kind = "wav", invert = "vocoder", mel_inverse = "pinv";
  auto* enh_cmd = app.add_subcommand("enhance", "Predict a clean mel from noisy audio (+ video) and invert it");
  enh_cmd->add_option("--audio", enh.audio, "Noisy WAV")->required();
  enh_cmd->add_option("--video", enh.video, "Mouth ROI clip (.vroi or PGM directory)");
  enh_cmd->add_option("--weights", enh.weights, "Enhancer LVWT file (with .json sidecar)")->required();
  enh_cmd->add_option("--vocoder-weights", enh.vocoder_weights, "Vocoder LVWT file");
  enh_cmd->add_option("--out", out_kind, "Output kind")->check(CLI::IsMember({"mel", "wav"}))->capture_default_str();
  enh_cmd->add_option("--out-path", enh.output, "Output file")->required();
  enh_cmd->add_option("--invert", invert, "Inversion method")
      ->check(CLI::IsMember({"vocoder", "griffin-lim", "noisy-phase"}))
      ->capture_default_str();
  enh_cmd->add_option("--iters", enh.iters, "Griffin-Lim iterations")->capture_default_str();
  enh_cmd->add_option("--mel-inverse", mel_inverse, "Mel to linear mapping")
      ->check(CLI::IsMember({"pinv", "nnls"}))
      ->capture_default_str();

  EvalOptions ev;
  std::vector<std::string> degs;
  std::string metric_csv;
  bool no_control = false;
  auto* eval_cmd = app.add_subcommand("eval", "Score enhanced audio against references");
  eval_cmd->add_option("--ref", ev.ref, "Clean reference WAV or directory")->required();
  eval_cmd->add_option("--noisy", ev.noisy, "Noisy input WAV or directory")->required();
  eval_cmd->add_option("--deg", degs, "[name=]path of a system's output (repeatable)");
  eval_cmd->add_option("--metrics", metric_csv, "Comma list: MCD,PESQ-WB,ViSQOL,STOI,ESTOI,Spec.MSE");
  eval_cmd->add_option("--json", ev.json, "Write the JSON report here");
  eval_cmd->add_option("--csv", ev.csv, "Write the CSV report here");
  eval_cmd->add_flag("--no-control", no_control, "Omit the noisy-vs-noisy control row");
  eval_cmd->add_option("--jobs", ev.jobs, "Worker threads")->capture_default_str();

  SelftestOptions st;
  auto* st_cmd = app.add_subcommand("selftest", "Run the built-in invariant suites");
  st_cmd->add_option("--filter", st.filter, "Run suites whose name contains this");
  st_cmd->add_option("--weights", st.weights, "Also verify this weight file");

  InitOptions init;
  auto* init_cmd = app.add_subcommand("init-weights", "Write seeded random weights and their config sidecar");
  init_cmd->add_option("--model", init.model, "enhancer, vocoder or discriminator")
      ->check(CLI::IsMember({"enhancer", "vocoder", "discriminator"}))
      ->capture_default_str();
  init_cmd->add_option("--config", init.config, "toy, full, micro or a JSON file")->capture_default_str();
  init_cmd->add_option("--seed", init.seed, "Initialization seed")->required();
  init_cmd->add_option("--out", init.out, "Output LVWT path")->required();

  std::uint64_t train_seed = 0;
  nn::MicroTrainOptions train;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("micro-train", "Fit the micro enhancer to one synthetic pair");
  train_cmd->add_option("--seed", train_seed, "Seed")->required();
  train_cmd->add_option("--steps", train.steps, "SGD steps")->capture_default_str();
  train_cmd->add_option("--lr", train.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--json", train_out, "Write the loss trajectory here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*mix_cmd) {
      if (mix_cmd->count("--condition")) mix.condition = condition;
      const auto r = cmd_mix(mix);
      out << "mixed " << r.size() << " utterances into " << mix.out_dir << '\n';
    } else if (*enh_cmd) {
      enh.wav_out = out_kind == "wav";
      enh.invert = parse_inversion(invert);
      enh.mel_inverse = mel_inverse == "nnls" ? dsp::MelInverse::kNonNegative : dsp::MelInverse::kPseudoInverse;
      const auto r = cmd_enhance(enh);
      out << "enhanced " << r.mel.n_frames << " frames -> " << enh.output << '\n';
    } else if (*eval_cmd) {
      for (const auto& d : degs) ev.systems.push_back(parse_system(d));
      if (!metric_csv.empty()) ev.metrics = parse_metric_list(metric_csv);
      ev.control = !no_control;
      const auto r = cmd_eval(ev);
      out << r.table;
      for (const auto& rep : r.reports) {
        for (const auto& [metric, why] : rep.errors) err << rep.utterance << " [" << rep.system << "] " << metric << ": " << why << '\n';
      }
      if (r.failed == r.reports.size()) return static_cast<int>(ExitCode::kData);
    } else if (*st_cmd) {
      const auto r = cmd_selftest(st, out);
      for (const auto& s : r) {
        if (!s.passed) return static_cast<int>(ExitCode::kVerification);
      }
    } else if (*init_cmd) {
      const auto sidecar = cmd_init_weights(init);
      out << "wrote " << init.out << " (" << sidecar["trainable_parameters"] << " trainable parameters)\n";
    } else if (*train_cmd) {
      const auto r = nn::micro_train_demo(train_seed, train);
      nlohmann::json doc = run_meta("micro-train", train_seed,
                                    {{"steps", train.steps}, {"lr", train.learning_rate}, {"fd_step", train.fd_step}});
      doc["parameters"] = r.n_params;
      doc["losses"] = r.losses;
      if (!train_out.empty()) std::ofstream(train_out) << doc.dump(2) << '\n';
      out << "loss " << r.losses.front() << " -> " << r.losses.back() << " after " << train.steps << " steps\n";
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kUsage);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.code() == Errc::kUnknownCondition ? ExitCode::kUsage : ExitCode::kData);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  }
  return static_cast<int>(ExitCode::kOk);
}

}  // namespace lavoce::cli
