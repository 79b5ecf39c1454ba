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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "lavoce/corrupt/mix.hpp"
#include "lavoce/dsp/synth.hpp"
#include "lavoce/metrics/report.hpp"

namespace lavoce::metrics {
namespace {

Waveform speech(std::size_t n, std::uint64_t seed) {
  auto w = dsp::speech_like(n, seed, 16000.0);
  const auto bed = dsp::white_noise(n, seed + 999, 1e-3, 16000.0);
  for (std::size_t i = 0; i < n; ++i) w.samples[i] += bed.samples[i];
  return w;
}

Waveform at_snr(const Waveform& clean, double snr_db, std::uint64_t seed) {
  auto noise = dsp::white_noise(clean.size(), seed, 1.0, clean.sample_rate);
  const double g = corrupt::gain_for_ratio(corrupt::signal_power(clean), corrupt::signal_power(noise), snr_db);
  Waveform out = clean;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += g * noise.samples[i];
  return out;
}

Waveform scaled(Waveform w, double g) {
  for (double& s : w.samples) s *= g;
  return w;
}

// Analytic 10 kHz pair with a quiet gap; reference values from pystoi.
std::pair<Waveform, Waveform> analytic_pair() {
  const double fs = 10000.0;
  Waveform x, y;
  x.sample_rate = y.sample_rate = fs;
  const double tau = 2.0 * std::numbers::pi;
  for (int i = 0; i < 30000; ++i) {
    const double t = i / fs;
    const double env = 0.5 + 0.5 * std::sin(tau * 3 * t);
    double v = std::sin(tau * 220 * t) * env +
               0.3 * std::sin(tau * 1250 * t) * (0.5 + 0.5 * std::cos(tau * 4.5 * t)) +
               0.1 * std::sin(tau * 2600 * t) * env * env;
    if (t > 1.2 && t < 1.5) v *= 1e-3;
    x.samples.push_back(v);
    y.samples.push_back(v + 0.4 * std::sin(tau * 3100 * t) + 0.3 * std::sin(tau * 700 * t) * std::cos(tau * 5 * t));
  }
  return {x, y};
}

TEST(Mcd, IdentitySymmetryAndGainInvariance) {
  const auto x = speech(32000, 1);
  const auto y = at_snr(x, 0.0, 2);
  EXPECT_EQ(mcd(x, x), 0.0);
  EXPECT_NEAR(mcd(x, scaled(x, 0.37)), 0.0, 1e-9);
  EXPECT_NEAR(mcd(x, scaled(x, 4.0)), 0.0, 1e-9);
  EXPECT_GT(mcd(x, y), 1.0);
  EXPECT_NEAR(mcd(x, y), mcd(y, x), 1e-12);
}

TEST(Mcd, TruncatesToCommonFramesAndChecksRate) {
  const auto x = speech(16000, 3);
  Waveform shorter = x;
  shorter.samples.resize(15800);
  // Only the last few frames see different edge padding.
  EXPECT_GT(mcd(x, shorter), 0.0);
  EXPECT_LT(mcd(x, shorter), 0.5);
  Waveform other = x;
  other.sample_rate = 8000;
  try {
    mcd(x, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kRateMismatch);
  }
  EXPECT_THROW(mcd(x, Waveform{}), Error);
}

TEST(SpecMse, IdentityZeroAndSymmetry) {
  const auto x = speech(16000, 4);
  const auto y = at_snr(x, 5.0, 5);
  EXPECT_EQ(spec_mse(x, x), 0.0);
  EXPECT_NEAR(spec_mse(x, y), spec_mse(y, x), 1e-15);
  Waveform zero = x;
  std::fill(zero.samples.begin(), zero.samples.end(), 0.0);
  const auto m = dsp::magnitudes(dsp::stft(x, AudioParams{}));
  double power = 0.0;
  for (double v : m.data) power += v * v;
  EXPECT_NEAR(spec_mse(x, zero), power / static_cast<double>(m.data.size()), 1e-12 * power);
  EXPECT_NE(spec_mse(x, scaled(x, 2.0)), 0.0);
}

TEST(Stoi, MatchesReferenceImplementation) {
  const auto [x, y] = analytic_pair();
  EXPECT_NEAR(stoi(x, y), 0.7896632405990369, 1e-9);
  EXPECT_NEAR(estoi(x, y), 0.5386961999285116, 1e-9);
}

TEST(Stoi, IdentityAndGain) {
  const auto x = speech(48000, 6);
  EXPECT_GE(stoi(x, x), 0.999);
  EXPECT_GE(estoi(x, x), 0.999);
  const auto y = at_snr(x, -5.0, 7);
  EXPECT_NEAR(estoi(x, y), estoi(x, scaled(y, 0.21)), 1e-9);
  EXPECT_NEAR(estoi(x, y), estoi(x, scaled(y, 7.5)), 1e-9);
}

TEST(Stoi, DecreasesWithSnr) {
  const double snrs[] = {5.0, 0.0, -5.0, -10.0, -15.0};
  double s[5] = {}, e[5] = {};
  for (std::uint64_t trial = 0; trial < 4; ++trial) {
    const auto x = speech(48000, 100 + trial);
    for (int k = 0; k < 5; ++k) {
      const auto y = at_snr(x, snrs[k], 200 + trial);
      s[k] += stoi(x, y);
      e[k] += estoi(x, y);
    }
  }
  for (int k = 1; k < 5; ++k) {
    EXPECT_LT(s[k], s[k - 1]) << snrs[k];
    EXPECT_LT(e[k], e[k - 1]) << snrs[k];
  }
}

TEST(Stoi, TooShortAndRateMismatch) {
  const auto x = speech(4000, 8);
  try {
    stoi(x, x);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::kTooShort);
  }
  Waveform other = speech(32000, 8);
  Waveform other_rate = other;
  other_rate.sample_rate = 22050;
  try {
    estoi(other, other_rate);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::kRateMismatch);
  }
}

TEST(Improvement, Conventions) {
  const auto ref = speech(48000, 9);
  const auto noisy = at_snr(ref, 0.0, 10);
  for (MetricId id : {MetricId::kMcd, MetricId::kStoi, MetricId::kEstoi, MetricId::kSpecMse}) {
    EXPECT_EQ(improvement(id, ref, noisy, noisy), 0.0) << metric_name(id);
  }
  EXPECT_NEAR(improvement(MetricId::kStoi, ref, noisy, ref), 1.0 - stoi(ref, noisy), 1e-9);
  EXPECT_DOUBLE_EQ(improvement(MetricId::kMcd, ref, noisy, ref), -mcd(ref, noisy));
  EXPECT_EQ(orientation(MetricId::kMcd), Orientation::kLowerBetter);
  EXPECT_EQ(orientation(MetricId::kSpecMse), Orientation::kLowerBetter);
  EXPECT_EQ(orientation(MetricId::kEstoi), Orientation::kHigherBetter);
  EXPECT_EQ(parse_metric("pesq-wb"), MetricId::kPesqWb);
  EXPECT_EQ(parse_metric("Spec.MSE"), MetricId::kSpecMse);
  EXPECT_THROW(parse_metric("snr"), Error);
}

TEST(External, StubCommandParsesValue) {
  const auto x = speech(8000, 11);
  ExternalMetric stub("PESQ-WB", "test -f {ref} && test -f {deg} && echo 'MOS-LQO = 2.50'");
  EXPECT_DOUBLE_EQ(stub(x, x), 2.50);
}

TEST(External, FailuresMapToErrorCodes) {
  const auto x = speech(8000, 12);
  try {
    ExternalMetric("PESQ-WB", "echo 'no score here'; echo oops >&2")(x, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kParseFailure);
    EXPECT_NE(std::string(e.what()).find("oops"), std::string::npos);
  }
  try {
    ExternalMetric("ViSQOL", "/nonexistent/visqol_binary {ref} {deg}")(x, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kExternalUnavailable);
  }
  EXPECT_EQ(parse_last_float("a 1 b -3.5e-1 end").value(), -0.35);
  EXPECT_FALSE(parse_last_float("none").has_value());
}

TEST(Report, OmitsUnavailableAndEmitsJsonCsv) {
  ::unsetenv(kPesqEnv);
  ::setenv(kVisqolEnv, "echo 3.25", 1);
  const auto ref = speech(48000, 13);
  const auto noisy = at_snr(ref, 0.0, 14);
  const auto enh = at_snr(ref, 10.0, 15);
  const std::vector<MetricId> ids(kAllMetrics.begin(), kAllMetrics.end());
  const auto r = evaluate("utt1", "enhanced", ref, noisy, enh, ids);
  ::unsetenv(kVisqolEnv);
  EXPECT_EQ(r.find(MetricId::kPesqWb), nullptr);
  ASSERT_EQ(r.errors.count("PESQ-WB"), 1u);
  EXPECT_NE(r.errors.at("PESQ-WB").find("ExternalUnavailable"), std::string::npos);
  ASSERT_NE(r.find(MetricId::kVisqol), nullptr);
  EXPECT_EQ(r.find(MetricId::kVisqol)->improvement, 0.0);
  EXPECT_GT(r.find(MetricId::kStoi)->improvement, 0.0);
  EXPECT_LT(r.find(MetricId::kMcd)->improvement, 0.0);

  const auto j = to_json(std::vector<UtteranceReport>{r});
  EXPECT_EQ(j[0]["metrics"]["MCD"]["orientation"], "lower");
  EXPECT_DOUBLE_EQ(j[0]["metrics"]["STOI"]["improvement"].get<double>(), r.find(MetricId::kStoi)->improvement);

  const auto csv = to_csv({r});
  EXPECT_EQ(csv.rfind("utterance,system,MCDi,PESQ-WBi,ViSQOLi,STOIi,ESTOIi,Spec.MSEi,", 0), 0u);
  EXPECT_NE(csv.find("utt1,enhanced,"), std::string::npos);
  const auto table = aggregate_table({r});
  EXPECT_NE(table.find("enhanced"), std::string::npos);
  EXPECT_NE(table.find("MCDi v"), std::string::npos);
}

}  // namespace
}  // namespace lavoce::metrics
