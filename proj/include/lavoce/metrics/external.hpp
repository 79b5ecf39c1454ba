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

#include <sys/wait.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <unistd.h>

#include "lavoce/core/error.hpp"
#include "lavoce/dsp/wav.hpp"

namespace lavoce::metrics {

inline constexpr const char* kPesqEnv = "LAVOCE_EXTERNAL_PESQ";
inline constexpr const char* kVisqolEnv = "LAVOCE_EXTERNAL_VISQOL";

namespace detail {

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("lavoce-ext-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

inline void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Last floating-point number in `text`, if any.
inline std::optional<double> parse_last_float(const std::string& text) {
  static const std::regex number(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");
  std::optional<double> last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), number); it != std::sregex_iterator(); ++it) {
    last = std::stod(it->str());
  }
  return last;
}

/// Runs an external scorer. The command template names the two inputs as
/// {ref} and {deg}; both are written as 16-bit WAVs in a private temp dir.
class ExternalMetric {
 public:
  ExternalMetric(std::string name, std::string command_template)
      : name_(std::move(name)), template_(std::move(command_template)) {}

  /// Adapter configured from an environment variable, if it is set.
  static std::optional<ExternalMetric> from_env(const std::string& name, const char* var) {
    const char* cmd = std::getenv(var);
    if (!cmd || !*cmd) return std::nullopt;
    return ExternalMetric(name, cmd);
  }

  const std::string& name() const { return name_; }

  double operator()(const dsp::Waveform& ref, const dsp::Waveform& deg) const {
    detail::TempDir dir;
    const auto ref_path = dir.path() / "ref.wav";
    const auto deg_path = dir.path() / "deg.wav";
    const auto err_path = dir.path() / "stderr.txt";
    dsp::save_wav(ref_path.string(), ref, dsp::WavEncoding::kPcm16);
    dsp::save_wav(deg_path.string(), deg, dsp::WavEncoding::kPcm16);
    std::string cmd = template_;
    detail::replace_all(cmd, "{ref}", detail::shell_quote(ref_path.string()));
    detail::replace_all(cmd, "{deg}", detail::shell_quote(deg_path.string()));
    cmd = "(" + cmd + ") 2>" + detail::shell_quote(err_path.string());

    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw Error(Errc::kExternalUnavailable, name_ + ": cannot spawn shell");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
    const int status = ::pclose(pipe);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    const std::string err = detail::slurp(err_path);
    if (code == 127 || code == 126) {
      throw Error(Errc::kExternalUnavailable, name_ + ": command not runnable: " + err);
    }
    if (code != 0) {
      throw Error(Errc::kParseFailure, name_ + ": exit status " + std::to_string(code) + ", stderr: " + err);
    }
    const auto value = parse_last_float(out);
    if (!value) {
      throw Error(Errc::kParseFailure, name_ + ": no number in output '" + out + "', stderr: " + err);
    }
    return *value;
  }

 private:
  std::string name_;
  std::string template_;
};

}  // namespace lavoce::metrics
