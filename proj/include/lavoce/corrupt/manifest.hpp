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

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lavoce/core/error.hpp"
#include "lavoce/corrupt/recipe.hpp"

namespace lavoce::corrupt {

// One line per utterance, comma-separated:
//   clean.wav, n1.wav;n2.wav, i1.wav;i2.wav, snr_db, sir_db, seed
// Either source list may be empty. '#' starts a comment line.
struct ManifestEntry {
  std::string clean;
  std::vector<std::string> noises;
  std::vector<std::string> interferers;
  MixRecipe recipe;
  std::size_t line = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> path_list(std::string_view s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  for (auto p : split(s, ';')) {
    if (!p.empty()) out.emplace_back(p);
  }
  return out;
}

template <class N>
N parse_number(std::string_view s, std::size_t line, const char* field) {
  N v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::kParseFailure,
                "manifest line " + std::to_string(line) + ": bad " + field + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

inline std::vector<ManifestEntry> parse_manifest(std::istream& in) {
  std::vector<ManifestEntry> entries;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 6) {
      throw Error(Errc::kParseFailure, "manifest line " + std::to_string(line_no) + ": expected 6 fields, got " +
                                           std::to_string(fields.size()));
    }
    ManifestEntry e;
    e.line = line_no;
    e.clean = std::string(fields[0]);
    if (e.clean.empty()) throw Error(Errc::kParseFailure, "manifest line " + std::to_string(line_no) + ": empty clean path");
    e.noises = detail::path_list(fields[1]);
    e.interferers = detail::path_list(fields[2]);
    e.recipe.snr_db = detail::parse_number<double>(fields[3], line_no, "snr_db");
    e.recipe.sir_db = detail::parse_number<double>(fields[4], line_no, "sir_db");
    e.recipe.seed = detail::parse_number<std::uint64_t>(fields[5], line_no, "seed");
    e.recipe.n_noises = static_cast<int>(e.noises.size());
    e.recipe.n_interferers = static_cast<int>(e.interferers.size());
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_manifest(in);
}

/// Relative paths resolve against the manifest's directory.
inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open manifest " + path.string());
  auto entries = parse_manifest(in);
  const auto base = path.parent_path();
  auto resolve = [&](std::string& p) {
    if (std::filesystem::path(p).is_relative()) p = (base / p).string();
  };
  for (auto& e : entries) {
    resolve(e.clean);
    for (auto& p : e.noises) resolve(p);
    for (auto& p : e.interferers) resolve(p);
  }
  return entries;
}

/// Draws `count` entries from a pool with replacement.
inline std::vector<std::string> draw_from_pool(const std::vector<std::string>& pool, int count, Rng& rng) {
  if (count > 0 && pool.empty()) throw Error(Errc::kInvalidArgument, "empty source pool");
  std::uniform_int_distribution<std::size_t> pick(0, pool.empty() ? 0 : pool.size() - 1);
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(pool[pick(rng)]);
  return out;
}

}  // namespace lavoce::corrupt
