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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "lavoce/dsp/inversion.hpp"
#include "lavoce/dsp/mel.hpp"
#include "lavoce/dsp/melf.hpp"
#include "lavoce/dsp/normalize.hpp"
#include "lavoce/dsp/resample.hpp"
#include "lavoce/dsp/stft.hpp"
#include "lavoce/dsp/synth.hpp"
#include "lavoce/dsp/wav.hpp"
#include "support/oracles.hpp"

namespace lavoce::dsp {
namespace {

Waveform uniform_noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Waveform w;
  w.samples.resize(n);
  for (auto& s : w.samples) s = u(rng);
  return w;
}

double max_abs_diff_prefix(const Waveform& a, const Waveform& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double m = 0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
  return m;
}

TEST(AudioParams, CanonicalConfigurationIsValid) {
  AudioParams p;
  EXPECT_EQ(p.fft_size, 1024u);
  EXPECT_EQ(p.win_size, 1024u);
  EXPECT_EQ(p.hop, 256u);
  EXPECT_EQ(p.n_mels, 80u);
  EXPECT_EQ(p.n_bins(), 513u);
  EXPECT_NO_THROW(p.validate());
}

TEST(AudioParams, RejectsNonColaHop) {
  AudioParams p;
  p.hop = 300;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.f_max = 9000;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.win_size = 2048;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Stft, ZeroSignalGivesZeroFrames) {
  Waveform w;
  w.samples.assign(16384, 0.0);
  const auto s = stft(w, {});
  EXPECT_EQ(s.n_frames, 65u);
  EXPECT_EQ(s.n_bins, 513u);
  for (const auto& z : s.data) EXPECT_EQ(std::abs(z), 0.0);
}

TEST(Stft, MatchesDirectDftOracle) {
  const AudioParams p;
  const auto w = sine(1000.0, 1.0, 16384);
  const auto s = stft(w, p);
  const auto pad = static_cast<long long>(p.fft_size / 2);
  for (std::size_t t : {0u, 1u, 17u, 40u, 64u}) {
    std::vector<double> frame(p.fft_size);
    for (std::size_t i = 0; i < p.fft_size; ++i) {
      frame[i] = testing::reflected_sample(w.samples, static_cast<long long>(t * p.hop + i), pad) *
                 testing::periodic_hann(i, p.win_size);
    }
    const auto ref = testing::direct_rdft(frame);
    for (std::size_t k = 0; k < ref.size(); ++k) {
      ASSERT_NEAR(std::abs(s.at(t, k) - ref[k]), 0.0, 1e-8) << "frame " << t << " bin " << k;
    }
  }
}

TEST(Stft, SinePeaksAtExpectedBin) {
  const auto s = stft(sine(1000.0, 1.0, 16384), {});
  for (std::size_t t = 4; t + 4 < s.n_frames; ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.n_bins; ++k) {
      if (std::abs(s.at(t, k)) > std::abs(s.at(t, best))) best = k;
    }
    EXPECT_EQ(best, 64u) << "frame " << t;
  }
}

TEST(Stft, Errors) {
  Waveform empty;
  try {
    stft(empty, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptySignal);
  }
  Waveform bad;
  bad.samples = {0.1, std::nan(""), 0.2};
  try {
    stft(bad, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNonFiniteSample);
  }
}

TEST(Istft, RoundTripRandomSignals) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = uniform_noise(16384, seed);
    const auto y = istft(stft(x, {}));
    ASSERT_EQ(y.size(), 16384u);
    EXPECT_LT(max_abs_diff_prefix(x, y), 1e-6);
  }
}

TEST(Istft, RoundTripOddLengthsKeepsPrefix) {
  for (std::size_t n : {512u, 700u, 16000u}) {
    const auto x = uniform_noise(n, n);
    const auto y = istft(stft(x, {}));
    EXPECT_EQ(y.size(), (n / 256) * 256);
    EXPECT_LT(max_abs_diff_prefix(x, y), 1e-6) << n;
  }
}

TEST(Istft, ZeroSpectrogramAndSingleFrame) {
  ComplexSpectrogram s;
  s.n_frames = 8;
  s.n_bins = 513;
  s.data.assign(8 * 513, {0.0, 0.0});
  const auto w = istft(s);
  EXPECT_EQ(w.size(), 7u * 256u);
  for (double v : w.samples) EXPECT_EQ(v, 0.0);

  s.n_frames = 1;
  s.data.resize(513);
  try {
    istft(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMinFrames);
  }
}

TEST(Stft, ParsevalWithWindowEnergy) {
  const AudioParams p;
  const auto win = analysis_window(p);
  double win_energy = 0;
  for (double v : win) win_energy += v * v;
  const double scale = static_cast<double>(p.fft_size) * win_energy / static_cast<double>(p.hop);
  for (std::uint64_t seed = 10; seed < 13; ++seed) {
    const auto x = uniform_noise(16000 * 4, seed);
    const auto s = stft(x, p);
    double spec = 0;
    for (std::size_t t = 0; t < s.n_frames; ++t) {
      for (std::size_t k = 0; k < s.n_bins; ++k) {
        const double wgt = (k == 0 || k == s.n_bins - 1) ? 1.0 : 2.0;
        spec += wgt * std::norm(s.at(t, k));
      }
    }
    double time = 0;
    for (double v : x.samples) time += v * v;
    EXPECT_NEAR(spec / (scale * time), 1.0, 0.01);
  }
}

TEST(MelFilterbank, MatchesFrozenSlaneyValues) {
  // Reference entries from librosa.filters.mel(sr=16000, n_fft=1024,
  // n_mels=80, fmin=0, fmax=8000, norm="slaney", dtype=float64).
  const auto fb = mel_filterbank({});
  ASSERT_EQ(fb.rows(), 80);
  ASSERT_EQ(fb.cols(), 513);
  EXPECT_NEAR(fb(0, 1), 0.011267280375145402, 1e-12);
  EXPECT_NEAR(fb(0, 2), 0.022534560750290804, 1e-12);
  EXPECT_NEAR(fb(0, 4), 0.00863771024396671, 1e-12);
  EXPECT_NEAR(fb(40, 110), 0.014444176346352967, 1e-12);
  EXPECT_NEAR(fb(79, 500), 0.0021035579418237746, 1e-12);
  EXPECT_NEAR(fb(79, 511), 0.0001752964951519625, 1e-12);
  EXPECT_EQ(fb(0, 0), 0.0);
  EXPECT_EQ(fb(0, 5), 0.0);
}

TEST(LogMel, SilenceSitsOnTheFloor) {
  Waveform w;
  w.samples.assign(8000, 0.0);
  const auto mel = log_mel(w, {});
  EXPECT_EQ(mel.n_mels, 80u);
  for (double v : mel.data) EXPECT_DOUBLE_EQ(v, std::log(1e-5));
  EXPECT_NEAR(std::log(1e-5), -11.5129, 1e-4);
}

TEST(LogMel, WhiteNoiseAboveFloorAndMatchesDenseOracle) {
  const AudioParams p;
  const auto w = white_noise(16000, 3, 0.3);
  const auto mel = log_mel(w, p);
  const auto fb = mel_filterbank(p);
  const auto s = stft(w, p);
  for (std::size_t t = 0; t < mel.n_frames; ++t) {
    for (std::size_t m = 0; m < 80; ++m) {
      double acc = 0;
      for (std::size_t k = 0; k < 513; ++k) {
        acc += fb(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) * std::abs(s.at(t, k));
      }
      ASSERT_GT(acc, p.log_floor);
      ASSERT_NEAR(mel.at(t, m), std::log(acc), 1e-10);
    }
  }
}

TEST(LogMel, GainShiftsUnclampedCellsByLogGain) {
  const auto x = speech_like(16000, 5);
  for (double g : {0.25, 3.0}) {
    Waveform y = x;
    for (auto& v : y.samples) v *= g;
    const auto a = log_mel(x, {});
    const auto b = log_mel(y, {});
    const double floor = std::log(1e-5);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      if (a.data[i] > floor && b.data[i] > floor) {
        ASSERT_NEAR(b.data[i] - a.data[i], std::log(g), 1e-9);
        ++checked;
      }
    }
    EXPECT_GT(checked, a.data.size() / 2);
  }
}

TEST(MelToLinear, SinePeakRecovered) {
  const auto w = sine(1000.0, 0.8, 16000);
  const auto lin = mel_to_linear(log_mel(w, {}));
  const auto truth = magnitudes(stft(w, {}));
  for (std::size_t t = 4; t + 4 < lin.n_frames; ++t) {
    std::size_t best = 0, true_best = 0;
    for (std::size_t k = 0; k < lin.n_bins; ++k) {
      if (lin.at(t, k) > lin.at(t, best)) best = k;
      if (truth.at(t, k) > truth.at(t, true_best)) true_best = k;
    }
    EXPECT_LE(std::abs(static_cast<long>(best) - static_cast<long>(true_best)), 1);
  }
}

TEST(MelToLinear, FloorMelGivesTinyMagnitudes) {
  MelSpectrogram mel;
  mel.n_frames = 4;
  mel.n_mels = 80;
  mel.data.assign(4 * 80, std::log(1e-5));
  const auto lin = mel_to_linear(mel);
  double mx = 0;
  for (double v : lin.data) {
    EXPECT_GE(v, 0.0);
    mx = std::max(mx, v);
  }
  // Pseudo-inverse of the constant 1e-5 vector, computed with numpy.linalg.pinv
  // on the float64 librosa filterbank: max entry 1.969279925e-4.
  EXPECT_NEAR(mx, 1.969279925251371e-4, 1e-9);
  EXPECT_LE(mx, 2e-4);
}

double mel_round_trip_error(const Waveform& w, MelInverse method) {
  const auto mel = log_mel(w, {});
  const auto lin = mel_to_linear(mel, method);
  const auto back = log_mel_from_magnitudes<double>(lin.data, lin.n_frames, {});
  double err = 0;
  for (std::size_t i = 0; i < back.size(); ++i) err += std::abs(back[i] - mel.data[i]);
  return err / static_cast<double>(back.size());
}

TEST(MelToLinear, NonNegativeInverseRoundTripsSpeechLikeSignals) {
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    EXPECT_LT(mel_round_trip_error(speech_like(16000, seed), MelInverse::kNonNegative), 0.15) << seed;
  }
}

TEST(MelToLinear, PseudoInverseRoundTripErrorIsBounded) {
  // Measured on these harmonic test signals: 0.162, 0.219, 0.287, 0.307.
  // The clamp discards the negative lobes the pseudo-inverse places in the
  // gaps between harmonics, so the error stays well above zero.
  const double measured[] = {0.1625, 0.2191, 0.2870, 0.3072};
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    EXPECT_NEAR(mel_round_trip_error(speech_like(16000, seed), MelInverse::kPseudoInverse), measured[seed], 5e-4);
  }
}

TEST(Nnls, SolvesSmallProblemsExactly) {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 1,
       0, 1, 1;
  Eigen::VectorXd b(2);
  b << 1, -1;  // unconstrained LS wants a negative entry
  const auto x = nnls(a, b);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_GE(x(i), 0.0);
  EXPECT_NEAR(x(0), 1.0, 1e-12);
  EXPECT_NEAR(x(1), 0.0, 1e-12);
  EXPECT_NEAR(x(2), 0.0, 1e-12);
}

TEST(PeakNormalize, Examples) {
  Waveform w;
  w.samples = {-0.5, 0.25};
  const auto n = peak_normalize(w);
  EXPECT_EQ(n.samples, (std::vector<double>{-1.0, 0.5}));
  EXPECT_EQ(peak_normalize(n).samples, n.samples);
  Waveform z;
  z.samples = {0.0, 0.0};
  try {
    peak_normalize(z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSilentSignal);
  }
}

TEST(PeakNormalize, IdempotentOnRandomSignals) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto once = peak_normalize(white_noise(300, seed));
    EXPECT_EQ(peak_normalize(once).samples, once.samples);
    EXPECT_DOUBLE_EQ(peak_abs(once), 1.0);
  }
}

TEST(GriffinLim, ConvergenceIsNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto mel = log_mel(speech_like(12000, seed), {});
    const auto r = griffin_lim_traced(mel);
    ASSERT_EQ(r.convergence.size(), kDefaultGriffinLimIters + 1);
    for (std::size_t k = 1; k < r.convergence.size(); ++k) {
      EXPECT_LE(r.convergence[k], r.convergence[k - 1] + 1e-12) << "iteration " << k;
    }
    EXPECT_LT(r.convergence.back(), r.convergence.front());
    EXPECT_DOUBLE_EQ(peak_abs(r.waveform), 1.0);
    EXPECT_EQ(r.waveform.size(), (mel.n_frames - 1) * 256);
  }
}

TEST(GriffinLim, ZeroMagnitudeIsSilent) {
  MelSpectrogram mel;
  mel.n_frames = 10;
  mel.n_mels = 80;
  mel.data.assign(800, -1e3);  // exp underflows to exactly zero
  try {
    griffin_lim(mel);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSilentSignal);
  }
  mel.n_frames = 1;
  mel.data.resize(80);
  try {
    griffin_lim(mel);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMinFrames);
  }
}

TEST(NoisyPhase, ExactMagnitudesReproduceInput) {
  const auto noisy = uniform_noise(16384, 9);
  const AudioParams p;
  const auto mags = magnitudes(stft(noisy, p));
  const auto out = phase_invert(mags, noisy, p);
  EXPECT_LT(max_abs_diff_prefix(noisy, out), 1e-6);
}

TEST(NoisyPhase, FloorMelIsNearSilentAndFrameGapRejected) {
  const auto noisy = uniform_noise(8192, 4);
  MelSpectrogram mel;
  mel.n_frames = 33;
  mel.n_mels = 80;
  mel.data.assign(33 * 80, std::log(1e-5));
  const auto out = noisy_phase_invert(mel, noisy);
  EXPECT_LT(peak_abs(out), 1e-3);

  mel.n_frames = 32;  // one frame short: tolerated
  mel.data.resize(32 * 80);
  EXPECT_EQ(noisy_phase_invert(mel, noisy).size(), 31u * 256u);

  mel.n_frames = 31;
  mel.data.resize(31 * 80);
  try {
    noisy_phase_invert(mel, noisy);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kShapeMismatch);
  }
}

TEST(Resample, IdentityIsBitExact) {
  const auto w = white_noise(1000, 1);
  const auto r = resample(w, 16000.0);
  EXPECT_EQ(r.samples, w.samples);
}

TEST(Resample, LengthAndDominantFrequency) {
  const auto w = sine(400.0, 0.9, 16384);
  const auto r = resample(w, 10000.0);
  EXPECT_EQ(r.size(), 10240u);
  EXPECT_EQ(r.sample_rate, 10000.0);
  const double f = testing::dominant_frequency(r.samples, 10000.0, 380.0, 420.0, 0.25);
  EXPECT_NEAR(f, 400.0, 2.0);
  // Interior amplitude preserved (passband gain ~1).
  double peak = 0;
  for (std::size_t i = 1000; i < 9000; ++i) peak = std::max(peak, std::abs(r.samples[i]));
  EXPECT_NEAR(peak, 0.9, 0.01);
}

TEST(Resample, NonIntegerRatioPath) {
  const auto w = sine(300.0, 0.5, 8000);
  const auto r = resample(w, 11025.5);
  EXPECT_EQ(r.size(), static_cast<std::size_t>(std::llround(8000 * 11025.5 / 16000.0)));
  EXPECT_NEAR(testing::dominant_frequency(r.samples, 11025.5, 280.0, 320.0, 0.5), 300.0, 2.0);
}

TEST(WavIo, RoundTripFloatAndPcm) {
  const auto dir = std::filesystem::temp_directory_path();
  Waveform w = white_noise(777, 2, 0.3);
  const auto f32 = (dir / "lavoce_test_f32.wav").string();
  save_wav(f32, w, WavEncoding::kFloat32);
  const auto back = load_wav(f32);
  ASSERT_EQ(back.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(back.samples[i], static_cast<double>(static_cast<float>(w.samples[i])));

  const auto p16 = (dir / "lavoce_test_p16.wav").string();
  save_wav(p16, w, WavEncoding::kPcm16);
  const auto back16 = load_wav(p16);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(back16.samples[i], w.samples[i], 1.0 / 32767.0);
}

TEST(WavIo, IngestResamplesToSixteenKilohertz) {
  const auto path = (std::filesystem::temp_directory_path() / "lavoce_test_8k.wav").string();
  save_wav(path, sine(200.0, 0.5, 8000, 8000.0));
  const auto w = load_wav(path);
  EXPECT_EQ(w.sample_rate, 16000.0);
  EXPECT_EQ(w.size(), 16000u);
}

TEST(WavIo, RejectsGarbage) {
  std::vector<std::uint8_t> junk = {'R', 'I', 'F', 'F', 0, 0};
  try {
    decode_wav(junk);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kBadHeader);
  }
}

TEST(Melf, RoundTripAndHeader) {
  const auto mel = log_mel(speech_like(4000, 1), {});
  const auto bytes = encode_melf(mel);
  ASSERT_EQ(bytes.size(), 12 + mel.data.size() * 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "MELF");
  EXPECT_EQ(bytes[4], static_cast<std::uint8_t>(mel.n_frames));
  EXPECT_EQ(bytes[8], 80);
  const auto back = decode_melf(bytes);
  ASSERT_EQ(back.n_frames, mel.n_frames);
  for (std::size_t i = 0; i < mel.data.size(); ++i) {
    EXPECT_EQ(back.data[i], static_cast<double>(static_cast<float>(mel.data[i])));
  }
  auto truncated = bytes;
  truncated.resize(20);
  EXPECT_THROW(decode_melf(truncated), Error);
}

}  // namespace
}  // namespace lavoce::dsp
