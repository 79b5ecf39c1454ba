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
#include <array>
#include <cctype>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "lavoce/core/error.hpp"
#include "lavoce/metrics/external.hpp"
#include "lavoce/metrics/spectral.hpp"
#include "lavoce/metrics/stoi.hpp"

namespace lavoce::metrics {

enum class MetricId { kMcd, kPesqWb, kVisqol, kStoi, kEstoi, kSpecMse };

enum class Orientation { kHigherBetter, kLowerBetter };

inline constexpr std::array kAllMetrics{MetricId::kMcd,  MetricId::kPesqWb, MetricId::kVisqol,
                                        MetricId::kStoi, MetricId::kEstoi,  MetricId::kSpecMse};

inline std::string metric_name(MetricId id) {
  switch (id) {
    case MetricId::kMcd: return "MCD";
    case MetricId::kPesqWb: return "PESQ-WB";
    case MetricId::kVisqol: return "ViSQOL";
    case MetricId::kStoi: return "STOI";
    case MetricId::kEstoi: return "ESTOI";
    case MetricId::kSpecMse: return "Spec.MSE";
  }
  return "?";
}

inline MetricId parse_metric(const std::string& s) {
  std::string key;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (key == "mcd") return MetricId::kMcd;
  if (key == "pesq" || key == "pesqwb") return MetricId::kPesqWb;
  if (key == "visqol") return MetricId::kVisqol;
  if (key == "stoi") return MetricId::kStoi;
  if (key == "estoi") return MetricId::kEstoi;
  if (key == "specmse" || key == "mse") return MetricId::kSpecMse;
  throw Error(Errc::kInvalidArgument, "unknown metric '" + s + "'");
}

inline Orientation orientation(MetricId id) {
  return id == MetricId::kMcd || id == MetricId::kSpecMse ? Orientation::kLowerBetter : Orientation::kHigherBetter;
}

inline bool is_external(MetricId id) { return id == MetricId::kPesqWb || id == MetricId::kVisqol; }

using MetricFn = std::function<double(const Waveform& ref, const Waveform& deg)>;

/// Built-in metrics directly; PESQ-WB and ViSQOL through environment
/// configured adapters (ExternalUnavailable when unset).
inline MetricFn metric_function(MetricId id) {
  switch (id) {
    case MetricId::kMcd: return mcd;
    case MetricId::kStoi: return stoi;
    case MetricId::kEstoi: return estoi;
    case MetricId::kSpecMse: return spec_mse;
    case MetricId::kPesqWb:
    case MetricId::kVisqol: {
      const char* var = id == MetricId::kPesqWb ? kPesqEnv : kVisqolEnv;
      auto ext = ExternalMetric::from_env(metric_name(id), var);
      if (!ext) {
        return [id, var](const Waveform&, const Waveform&) -> double {
          throw Error(Errc::kExternalUnavailable, metric_name(id) + ": set " + var + " to a command template");
        };
      }
      return *ext;
    }
  }
  throw Error(Errc::kInvalidArgument, "metric id");
}

/// metric(ref, enhanced) - metric(ref, noisy). Lower-better metrics keep the
/// raw sign, so a negative MCD improvement is a gain.
inline double improvement(const MetricFn& metric, const Waveform& ref, const Waveform& noisy, const Waveform& enhanced) {
  return metric(ref, enhanced) - metric(ref, noisy);
}

inline double improvement(MetricId id, const Waveform& ref, const Waveform& noisy, const Waveform& enhanced) {
  return improvement(metric_function(id), ref, noisy, enhanced);
}

struct MetricEntry {
  MetricId id;
  double enhanced = 0.0;
  double noisy = 0.0;
  double improvement = 0.0;
};

struct UtteranceReport {
  std::string utterance;
  std::string system;
  std::vector<MetricEntry> entries;
  std::map<std::string, std::string> errors;  ///< metric -> reason (omitted metrics)

  const MetricEntry* find(MetricId id) const {
    for (const auto& e : entries) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }
};

/// Scores one (ref, noisy, enhanced) triple. Metrics whose adapter is
/// unavailable, or whose input is too short, are omitted with a reason.
inline UtteranceReport evaluate(const std::string& utterance, const std::string& system, const Waveform& ref,
                                const Waveform& noisy, const Waveform& enhanced, const std::vector<MetricId>& ids) {
  UtteranceReport r{utterance, system, {}, {}};
  for (MetricId id : ids) {
    const auto fn = metric_function(id);
    try {
      MetricEntry e{id};
      e.noisy = fn(ref, noisy);
      e.enhanced = fn(ref, enhanced);
      e.improvement = e.enhanced - e.noisy;
      r.entries.push_back(e);
    } catch (const Error& err) {
      if (err.code() != Errc::kExternalUnavailable && err.code() != Errc::kParseFailure &&
          err.code() != Errc::kTooShort) {
        throw;
      }
      r.errors[metric_name(id)] = err.what();
    }
  }
  return r;
}

inline nlohmann::json to_json(const UtteranceReport& r) {
  nlohmann::json j;
  j["utterance"] = r.utterance;
  j["system"] = r.system;
  nlohmann::json m = nlohmann::json::object();
  for (const auto& e : r.entries) {
    m[metric_name(e.id)] = {{"enhanced", e.enhanced},
                            {"noisy", e.noisy},
                            {"improvement", e.improvement},
                            {"orientation", orientation(e.id) == Orientation::kLowerBetter ? "lower" : "higher"}};
  }
  j["metrics"] = m;
  j["errors"] = r.errors;
  return j;
}

inline nlohmann::json to_json(const std::vector<UtteranceReport>& rs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rs) arr.push_back(to_json(r));
  return arr;
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace detail

/// One row per utterance: improvements first (MCDi, PESQ-WBi, ViSQOLi,
/// STOIi, ESTOIi, Spec.MSEi), then raw enhanced/noisy values, then errors.
inline std::string to_csv(const std::vector<UtteranceReport>& rs) {
  std::ostringstream os;
  os << "utterance,system";
  for (MetricId id : kAllMetrics) os << ',' << metric_name(id) << 'i';
  for (MetricId id : kAllMetrics) os << ',' << metric_name(id) << "_enh," << metric_name(id) << "_noisy";
  os << ",errors\n";
  for (const auto& r : rs) {
    os << detail::csv_field(r.utterance) << ',' << detail::csv_field(r.system);
    for (MetricId id : kAllMetrics) {
      os << ',';
      if (const auto* e = r.find(id)) os << detail::fmt(e->improvement);
    }
    for (MetricId id : kAllMetrics) {
      os << ',';
      if (const auto* e = r.find(id)) os << detail::fmt(e->enhanced);
      os << ',';
      if (const auto* e = r.find(id)) os << detail::fmt(e->noisy);
    }
    std::string errs;
    for (const auto& [k, v] : r.errors) errs += (errs.empty() ? "" : "; ") + k + ": " + v;
    os << ',' << detail::csv_field(errs) << '\n';
  }
  return os.str();
}

/// Mean improvement per system, one row each, metrics in report order.
inline std::string aggregate_table(const std::vector<UtteranceReport>& rs) {
  std::vector<std::string> systems;
  for (const auto& r : rs) {
    if (std::find(systems.begin(), systems.end(), r.system) == systems.end()) systems.push_back(r.system);
  }
  std::ostringstream os;
  os << std::left << std::setw(16) << "system";
  for (MetricId id : kAllMetrics) {
    os << std::right << std::setw(12) << (metric_name(id) + "i" + (orientation(id) == Orientation::kLowerBetter ? " v" : " ^"));
  }
  os << '\n';
  for (const auto& s : systems) {
    os << std::left << std::setw(16) << s;
    for (MetricId id : kAllMetrics) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& r : rs) {
        if (r.system != s) continue;
        if (const auto* e = r.find(id)) {
          sum += e->improvement;
          ++n;
        }
      }
      std::ostringstream cell;
      if (n) {
        cell << std::fixed << std::setprecision(id == MetricId::kStoi || id == MetricId::kEstoi ? 3 : 2) << sum / n;
      } else {
        cell << "-";
      }
      os << std::right << std::setw(12) << cell.str();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace lavoce::metrics
