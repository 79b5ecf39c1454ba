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
#include <numbers>
#include <sstream>

#include "lavoce/corrupt/manifest.hpp"
#include "lavoce/corrupt/mix.hpp"
#include "lavoce/dsp/synth.hpp"

namespace lavoce::corrupt {
namespace {

constexpr std::size_t kRate = 16000;

Waveform speech(std::size_t n, std::uint64_t seed) { return dsp::speech_like(n, seed, kRate); }
Waveform noise(std::size_t n, std::uint64_t seed) { return dsp::white_noise(n, seed, 0.3, kRate); }

std::vector<Waveform> sources(int count, std::size_t n, std::uint64_t seed, bool speechy) {
  std::vector<Waveform> out;
  for (int i = 0; i < count; ++i) {
    const std::size_t len = n / 2 + (static_cast<std::size_t>(i) * 7919 + seed * 104729) % (n + n / 2);
    out.push_back(speechy ? speech(len, seed * 31 + i) : noise(len, seed * 17 + i));
  }
  return out;
}

TEST(SignalPower, AnalyticValues) {
  Waveform square;
  for (int i = 0; i < 1000; ++i) square.samples.push_back(i % 20 < 10 ? 1.0 : -1.0);
  EXPECT_DOUBLE_EQ(signal_power(square), 1.0);
  EXPECT_NEAR(signal_power(dsp::sine(100.0, 1.0, 16000, 16000.0)), 0.5, 1e-12);
  Waveform zero;
  zero.samples.assign(64, 0.0);
  EXPECT_EQ(signal_power(zero), 0.0);
  try {
    signal_power(Waveform{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptySignal);
  }
}

TEST(GainForRatio, ClosedForm) {
  EXPECT_DOUBLE_EQ(gain_for_ratio(0.3, 0.3, 0.0), 1.0);
  EXPECT_NEAR(gain_for_ratio(0.3, 0.3, -10.0), std::pow(10.0, 0.5), 1e-12);
  EXPECT_NEAR(gain_for_ratio(0.3, 0.3, -10.0), 3.16228, 1e-5);
  try {
    gain_for_ratio(1.0, 0.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSilentSignal);
  }
}

TEST(Presets, ConditionTuples) {
  EXPECT_EQ(preset_condition(1), (MixRecipe{0.0, 0.0, 1, 1, 0}));
  EXPECT_EQ(preset_condition(2), (MixRecipe{-5.0, -5.0, 3, 2, 0}));
  EXPECT_EQ(preset_condition(3), (MixRecipe{-10.0, -10.0, 5, 3, 0}));
  for (int bad : {0, 4, -1}) {
    try {
      preset_condition(bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kUnknownCondition);
    }
  }
}

TEST(TrainingSampler, DeterministicAndInRange) {
  EXPECT_EQ(sample_training_recipe(42), sample_training_recipe(42));
  EXPECT_NE(sample_training_recipe(42), sample_training_recipe(43));
  double mean = 0.0;
  bool saw_noise_extremes[2] = {false, false};
  bool saw_int_extremes[2] = {false, false};
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto r = sample_training_recipe(s);
    ASSERT_GE(r.n_noises, 1);
    ASSERT_LE(r.n_noises, 5);
    ASSERT_GE(r.n_interferers, 1);
    ASSERT_LE(r.n_interferers, 3);
    ASSERT_GE(r.snr_db, -15.0);
    ASSERT_LE(r.snr_db, 5.0);
    ASSERT_GE(r.sir_db, -15.0);
    ASSERT_LE(r.sir_db, 5.0);
    saw_noise_extremes[0] |= r.n_noises == 1;
    saw_noise_extremes[1] |= r.n_noises == 5;
    saw_int_extremes[0] |= r.n_interferers == 1;
    saw_int_extremes[1] |= r.n_interferers == 3;
    mean += r.snr_db;
  }
  mean /= 10000.0;
  EXPECT_GE(mean, -5.5);
  EXPECT_LE(mean, -4.5);
  EXPECT_TRUE(saw_noise_extremes[0] && saw_noise_extremes[1]);
  EXPECT_TRUE(saw_int_extremes[0] && saw_int_extremes[1]);
}

TEST(FitLength, LoopsAndCrops) {
  Rng rng(5);
  Waveform src;
  for (int i = 0; i < 10; ++i) src.samples.push_back(i);
  const auto looped = fit_length(src, 25, rng);
  ASSERT_EQ(looped.size(), 25u);
  for (std::size_t i = 1; i < 25; ++i) {
    EXPECT_EQ(looped.samples[i], std::fmod(looped.samples[i - 1] + 1.0, 10.0));
  }
  const auto cropped = fit_length(src, 4, rng);
  ASSERT_EQ(cropped.size(), 4u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(cropped.samples[i], cropped.samples[i - 1] + 1.0);
  EXPECT_EQ(fit_length(src, 10, rng).samples, src.samples);
}

TEST(Mix, ConditionOneHitsZeroDb) {
  const auto clean = speech(kRate, 1);
  const auto r = mix(clean, sources(1, kRate, 2, false), sources(1, kRate, 3, true), preset_condition(1, 9));
  EXPECT_NEAR(r.measured_snr_db, 0.0, 0.01);
  EXPECT_NEAR(r.measured_sir_db, 0.0, 0.01);
  EXPECT_NEAR(dsp::peak_abs(r.noisy), 1.0, 1e-15);
  EXPECT_NEAR(dsp::peak_abs(r.clean), 1.0, 1e-15);
  EXPECT_EQ(r.noisy.size(), clean.size());
}

TEST(Mix, RemeasuredRatiosMatchTargetsForAllConditions) {
  for (int cond = 1; cond <= 3; ++cond) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto rec = preset_condition(cond, seed);
      const auto clean = speech(kRate + seed * 1000, seed + 100);
      const auto r = mix(clean, sources(rec.n_noises, clean.size(), seed, false),
                         sources(rec.n_interferers, clean.size(), seed + 50, true), rec);
      const double p = signal_power(r.clean_premix);
      EXPECT_NEAR(10 * std::log10(p / signal_power(r.noise)), rec.snr_db, 0.01);
      EXPECT_NEAR(10 * std::log10(p / signal_power(r.interference)), rec.sir_db, 0.01);
    }
  }
}

TEST(Mix, NoInterferersIsPlainAdditiveNoise) {
  MixRecipe rec{3.0, 0.0, 1, 0, 4};
  const auto clean = speech(8000, 4);
  const auto r = mix(clean, sources(1, 8000, 4, false), {}, rec);
  EXPECT_NEAR(r.measured_snr_db, 3.0, 0.01);
  EXPECT_TRUE(std::isinf(r.measured_sir_db));
  for (double s : r.interference.samples) EXPECT_EQ(s, 0.0);
}

TEST(Mix, LinearityOfStoredComponents) {
  const auto rec = preset_condition(3, 77);
  const auto clean = speech(12000, 7);
  const auto r = mix(clean, sources(5, 12000, 7, false), sources(3, 12000, 8, true), rec);
  for (std::size_t k = 0; k < clean.size(); ++k) {
    const double sum = r.clean_premix.samples[k] + r.noise.samples[k] + r.interference.samples[k];
    ASSERT_NEAR(sum, r.premix.samples[k], 1e-12);
  }
  const double peak = dsp::peak_abs(r.premix);
  for (std::size_t k = 0; k < clean.size(); ++k) ASSERT_NEAR(r.noisy.samples[k] * peak, r.premix.samples[k], 1e-12);
}

TEST(Mix, DeterministicGivenSeed) {
  const auto rec = preset_condition(2, 11);
  const auto clean = speech(9000, 3);
  const auto n = sources(3, 9000, 1, false);
  const auto i = sources(2, 9000, 2, true);
  const auto a = mix(clean, n, i, rec);
  const auto b = mix(clean, n, i, rec);
  EXPECT_EQ(a.noisy.samples, b.noisy.samples);
  auto other = rec;
  other.seed = 12;
  EXPECT_NE(mix(clean, n, i, other).noisy.samples, a.noisy.samples);
}

TEST(Mix, ErrorCases) {
  const auto clean = speech(4000, 1);
  try {
    mix(clean, sources(2, 4000, 1, false), sources(1, 4000, 1, true), preset_condition(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kLengthMismatch);
  }
  Waveform silent;
  silent.samples.assign(4000, 0.0);
  try {
    mix(clean, std::vector<Waveform>{silent}, sources(1, 4000, 1, true), preset_condition(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSilentSignal);
  }
  try {
    mix(silent, sources(1, 4000, 1, false), sources(1, 4000, 1, true), preset_condition(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSilentSignal);
  }
  MixRecipe none{0, 0, 0, 0, 0};
  EXPECT_THROW(none.validate(), Error);
}

TEST(Manifest, ParsesLinesAndSkipsComments) {
  const auto entries = parse_manifest(
      "# clean, noises, interferers, snr, sir, seed\n"
      "\n"
      "a.wav, n1.wav;n2.wav, i1.wav, -5, -2.5, 17\n"
      "b.wav,,i1.wav;i2.wav,0,3,1\n");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].clean, "a.wav");
  EXPECT_EQ(entries[0].noises, (std::vector<std::string>{"n1.wav", "n2.wav"}));
  EXPECT_EQ(entries[0].recipe, (MixRecipe{-5.0, -2.5, 2, 1, 17}));
  EXPECT_EQ(entries[0].line, 3u);
  EXPECT_TRUE(entries[1].noises.empty());
  EXPECT_EQ(entries[1].recipe.n_interferers, 2);
}

TEST(Manifest, RejectsMalformedLines) {
  for (const char* bad : {"a.wav, n.wav, i.wav, x, 0, 1\n", "a.wav, n.wav\n", ", n.wav, i.wav, 0, 0, 1\n",
                          "a.wav, n.wav, i.wav, 0, 0, -3\n"}) {
    try {
      parse_manifest(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kParseFailure);
    }
  }
}

}  // namespace
}  // namespace lavoce::corrupt
