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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "lavoce/cli/common.hpp"
#include "lavoce/dsp/wav.hpp"
#include "lavoce/metrics/report.hpp"

namespace lavoce::cli {

struct SystemInput {
  std::string name;
  std::string path;
};

/// "name=path" or a bare path (named after its file or directory stem).
inline SystemInput parse_system(const std::string& s) {
  const auto eq = s.find('=');
  if (eq != std::string::npos && eq > 0) return {s.substr(0, eq), s.substr(eq + 1)};
  return {std::filesystem::path(s).stem().string(), s};
}

struct EvalOptions {
  std::string ref;
  std::string noisy;
  std::vector<SystemInput> systems;
  std::vector<metrics::MetricId> metrics{metrics::kAllMetrics.begin(), metrics::kAllMetrics.end()};
  std::string json;
  std::string csv;
  bool control = true;  ///< add a row scoring the noisy input against itself
  std::size_t jobs = 1;
};

struct EvalResult {
  std::vector<metrics::UtteranceReport> reports;
  std::string table;
  std::size_t failed = 0;
};

inline constexpr const char* kControlSystem = "noisy";

namespace detail {

/// Utterance key: file stem without a trailing role suffix.
inline std::string utterance_key(const std::filesystem::path& p) {
  std::string stem = p.stem().string();
  for (const char* suffix : {"_clean", "_noisy", "_enhanced", "_enh", "_deg"}) {
    const std::string s(suffix);
    if (stem.size() > s.size() && stem.compare(stem.size() - s.size(), s.size(), s) == 0) {
      return stem.substr(0, stem.size() - s.size());
    }
  }
  return stem;
}

/// key -> path for a directory of WAVs, or the single file under its key.
inline std::map<std::string, std::string> index_inputs(const std::string& path, bool* is_dir = nullptr) {
  std::map<std::string, std::string> out;
  const bool dir = std::filesystem::is_directory(path);
  if (is_dir) *is_dir = dir;
  if (!dir) {
    out[utterance_key(path)] = path;
    return out;
  }
  for (const auto& e : std::filesystem::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".wav") out[utterance_key(e.path())] = e.path().string();
  }
  return out;
}

/// Directories hold several roles side by side; pick the file whose stem
/// ends with the wanted suffix when both are present.
inline std::map<std::string, std::string> index_role(const std::string& path, const std::string& suffix) {
  if (!std::filesystem::is_directory(path)) return index_inputs(path);
  std::map<std::string, std::string> all, preferred;
  for (const auto& e : std::filesystem::directory_iterator(path)) {
    if (!e.is_regular_file() || e.path().extension() != ".wav") continue;
    const auto key = utterance_key(e.path());
    all.emplace(key, e.path().string());
    const auto stem = e.path().stem().string();
    if (stem.size() >= suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
      preferred[key] = e.path().string();
    }
  }
  for (auto& [k, v] : preferred) all[k] = v;
  return all;
}

inline void crop_to(dsp::Waveform& w, std::size_t n) { w.samples.resize(std::min(w.samples.size(), n)); }

inline metrics::UtteranceReport failed_row(const std::string& utt, const std::string& system, const std::string& why) {
  metrics::UtteranceReport r{utt, system, {}, {}};
  r.errors["input"] = why;
  return r;
}

}  // namespace detail

/// Scores every system against the references. Signals are cropped to the
/// shortest of (ref, noisy, deg). A bad utterance becomes an error row; the
/// batch carries on.
inline EvalResult cmd_eval(const EvalOptions& o) {
  if (o.ref.empty() || o.noisy.empty()) throw UsageError("eval: --ref and --noisy are required");
  if (o.systems.empty() && !o.control) throw UsageError("eval: nothing to score (give --deg)");
  const auto refs = detail::index_role(o.ref, "_clean");
  const auto noisies = detail::index_role(o.noisy, "_noisy");
  const bool single = !std::filesystem::is_directory(o.ref);

  std::vector<SystemInput> systems = o.systems;
  if (o.control) systems.push_back({kControlSystem, o.noisy});
  std::vector<std::map<std::string, std::string>> degs;
  for (const auto& s : systems) {
    degs.push_back(s.name == kControlSystem && s.path == o.noisy ? noisies : detail::index_inputs(s.path));
  }

  struct Job {
    std::string utt;
    std::size_t system;
  };
  std::vector<Job> jobs;
  for (const auto& [key, path] : refs) {
    for (std::size_t s = 0; s < systems.size(); ++s) jobs.push_back({key, s});
  }
  EvalResult res;
  res.reports.resize(jobs.size());
  parallel_for(jobs.size(), o.jobs, [&](std::size_t i) {
    const auto& job = jobs[i];
    const auto& sys = systems[job.system];
    auto lookup = [&](const std::map<std::string, std::string>& m, const char* role) {
      if (single) return m.begin()->second;
      const auto it = m.find(job.utt);
      if (it == m.end()) throw Error(Errc::kIo, std::string("no ") + role + " file for '" + job.utt + "'");
      return it->second;
    };
    try {
      auto ref = dsp::load_wav(lookup(refs, "reference"));
      auto noisy = dsp::load_wav(lookup(noisies, "noisy"));
      auto deg = dsp::load_wav(lookup(degs[job.system], "degraded"));
      const std::size_t n = std::min({ref.size(), noisy.size(), deg.size()});
      for (auto* w : {&ref, &noisy, &deg}) detail::crop_to(*w, n);
      res.reports[i] = metrics::evaluate(job.utt, sys.name, ref, noisy, deg, o.metrics);
    } catch (const Error& e) {
      res.reports[i] = detail::failed_row(job.utt, sys.name, e.what());
    }
  });
  for (const auto& r : res.reports) res.failed += r.entries.empty() ? 1 : 0;
  res.table = metrics::aggregate_table(res.reports);

  std::vector<std::string> names;
  for (auto id : o.metrics) names.push_back(metrics::metric_name(id));
  nlohmann::json config = {{"ref", o.ref}, {"noisy", o.noisy}, {"metrics", names}, {"control", o.control}};
  for (const auto& s : systems) config["systems"][s.name] = s.path;
  if (!o.json.empty()) {
    nlohmann::json doc = run_meta("eval", 0, config);
    doc["reports"] = metrics::to_json(res.reports);
    std::ofstream(o.json) << doc.dump(2) << '\n';
  }
  if (!o.csv.empty()) std::ofstream(o.csv) << metrics::to_csv(res.reports);
  return res;
}

}  // namespace lavoce::cli
