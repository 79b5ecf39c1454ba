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
#include <filesystem>
#include <random>

#include "lavoce/nn/config.hpp"
#include "lavoce/nn/discriminators.hpp"
#include "lavoce/nn/enhancer.hpp"
#include "lavoce/nn/gradcheck.hpp"
#include "lavoce/nn/losses.hpp"
#include "lavoce/nn/manifest.hpp"
#include "lavoce/nn/micro_train.hpp"
#include "lavoce/nn/visual_encoder.hpp"
#include "lavoce/nn/vocoder.hpp"
#include "lavoce/nn/weights_io.hpp"

namespace lavoce::nn {
namespace {

Mat<double> random_mel(std::size_t frames, std::size_t bands, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n(-4.0, 1.5);
  Mat<double> m(idx(frames), idx(bands));
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

visual::VideoClip random_clip(std::size_t frames, std::uint64_t seed) {
  auto c = visual::VideoClip::zeros(frames);
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : c.pixels) v = u(rng);
  return c;
}

std::vector<double> random_wave(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> w(n);
  for (double& v : w) v = u(rng);
  return w;
}

DiscOutput<double> stub(double out, std::vector<std::vector<double>> feats) {
  return {std::vector<double>(6, out), std::move(feats)};
}

TEST(ParamCount, VocoderMatchesPublishedSize) {
  const auto n = vocoder_manifest(VocoderConfig::full()).trainable_count();
  EXPECT_EQ(n, 13'926'017u);
  EXPECT_NEAR(static_cast<double>(n), 13.92e6, 0.01 * 13.92e6);
}

TEST(ParamCount, EnhancerMatchesClosedForm) {
  const std::size_t d = 768, ff = 3072, mels = 80, a = 512, v = 512;
  const std::size_t per_layer = 4 * (d * d + d) + d * d + 2 * d + 2 * 2 * d + (d * ff + ff) + (ff * d + d);
  const std::size_t resnet18_trunk = 11'166'976;  // torchvision resnet18 minus conv1, bn1, fc
  const std::size_t stem = 64 * 5 * 7 * 7 + 2 * 64;
  const std::size_t expected = (mels * a + a) + (stem + resnet18_trunk) + ((a + v) * d + d) + 12 * per_layer + 2 * d +
                               (d * mels + mels);
  const auto m = enhancer_manifest(EnhancerConfig::full());
  EXPECT_EQ(m.trainable_count(), expected);
  EXPECT_GT(m.total_count(), m.trainable_count());
}

TEST(ParamCount, MicroEnhancerIsSmall) {
  EXPECT_LE(enhancer_manifest(EnhancerConfig::micro()).trainable_count(), 500u);
}

TEST(Enhancer, OutputFramesFollowAudio) {
  const auto cfg = EnhancerConfig::toy();
  const auto w = init_weights(enhancer_manifest(cfg), 1);
  const auto clip = random_clip(25, 2);
  const auto out = enhance(random_mel(63, cfg.n_mels, 3), &clip, w, cfg);
  EXPECT_EQ(out.rows(), 63);
  EXPECT_EQ(out.cols(), 80);
}

TEST(Enhancer, AttentionRowsSumToOne) {
  const auto cfg = EnhancerConfig::toy();
  const auto w = init_weights(enhancer_manifest(cfg), 4);
  const auto clip = random_clip(8, 5);
  AttentionTrace trace;
  enhancer_forward(random_mel(20, cfg.n_mels, 6), &clip, w, cfg, &trace);
  ASSERT_EQ(trace.maps.size(), cfg.n_layers * cfg.n_heads);
  for (const auto& m : trace.maps) {
    for (Index r = 0; r < m.rows(); ++r) EXPECT_NEAR(m.row(r).sum(), 1.0, 1e-6);
  }
}

TEST(Enhancer, DeterministicAndRejectsBadInput) {
  auto cfg = EnhancerConfig::toy();
  const auto w = init_weights(enhancer_manifest(cfg), 7);
  const auto clip = random_clip(5, 8);
  const auto mel = random_mel(12, cfg.n_mels, 9);
  EXPECT_EQ(enhancer_forward(mel, &clip, w, cfg), enhancer_forward(mel, &clip, w, cfg));
  try {
    enhancer_forward(random_mel(12, 40, 9), &clip, w, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kShapeMismatch);
  }
  try {
    enhancer_forward(mel, nullptr, w, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kShapeMismatch);
  }
}

TEST(VisualEncoder, KeepsTemporalResolution) {
  const auto cfg = EnhancerConfig::toy();
  const auto w = init_weights(enhancer_manifest(cfg), 10);
  const auto out = visual_encode(random_clip(75, 11), w, cfg);
  EXPECT_EQ(out.rows(), 75);
  EXPECT_EQ(out.cols(), 64);
}

TEST(VisualEncoder, ZeroClipGivesZeroFeatures) {
  const auto cfg = EnhancerConfig::toy();
  const auto w = init_weights(enhancer_manifest(cfg), 12);
  const auto out = visual_encode(visual::VideoClip::zeros(3), w, cfg);
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Vocoder, LengthAndRange) {
  const auto cfg = VocoderConfig::toy();
  const auto w = init_weights(vocoder_manifest(cfg), 13);
  Mat<double> mel = random_mel(32, 80, 14);
  const auto wav = vocoder_forward(mel, w, cfg);
  EXPECT_EQ(wav.size(), 8192u);
  for (double s : wav) ASSERT_LE(std::abs(s), 1.0);
}

TEST(Discriminators, EnsembleLayout) {
  const auto cfg = VocoderConfig::toy();
  const auto w = init_weights(discriminator_manifest(cfg), 15);
  const auto out = discriminate(random_wave(1024, 16), w, cfg);
  ASSERT_EQ(out.size(), 8u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(out[i].features.size(), cfg.mpd_channels.size() + 1);
  for (std::size_t i = 5; i < 8; ++i) EXPECT_EQ(out[i].features.size(), cfg.msd_channels.size() + 1);
  EXPECT_EQ(period_padded_length(100, 7), 105u);
  EXPECT_EQ(period_padded_length(105, 7), 105u);
  EXPECT_EQ(avg_pool2(random_wave(101, 1)).size(), 50u);
}

TEST(Discriminators, TooShortInput) {
  const auto cfg = VocoderConfig::toy();
  const auto w = init_weights(discriminator_manifest(cfg), 15);
  try {
    msd_forward(random_wave(8, 1), w, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTooShort);
  }
}

TEST(Losses, EnhancerL1) {
  Mat<double> a(1, 2), b(1, 2);
  a << 0, 1;
  b << 1, 1;
  EXPECT_DOUBLE_EQ(enhancer_loss(a, b), 0.5);
  EXPECT_DOUBLE_EQ(enhancer_loss(b, a), 0.5);
  EXPECT_DOUBLE_EQ(enhancer_loss(a, a), 0.0);
  Mat<double> c(2, 1);
  EXPECT_THROW(enhancer_loss(a, c), Error);
}

TEST(Losses, StubIdentities) {
  const auto wav = random_wave(4096, 17);
  std::vector<std::vector<double>> feats{{0.1, 0.2}, {0.3}};
  std::vector<DiscOutput<double>> ones(8, stub(1.0, feats)), zeros(8, stub(0.0, feats));
  const auto at_fixed_point = generator_loss<double>(wav, wav, ones, ones);
  EXPECT_NEAR(at_fixed_point.total, 0.0, 1e-12);
  const auto fooled_none = generator_loss<double>(wav, wav, zeros, zeros);
  EXPECT_NEAR(fooled_none.adv, 8.0, 1e-12);
  EXPECT_NEAR(fooled_none.spec, 0.0, 1e-12);
  EXPECT_NEAR(fooled_none.fm, 0.0, 1e-12);
  EXPECT_NEAR(fooled_none.total, 8.0, 1e-12);
  EXPECT_NEAR(discriminator_loss(ones, zeros), 0.0, 1e-12);
  EXPECT_NEAR(discriminator_loss(zeros, ones), 16.0, 1e-12);
}

TEST(Losses, WeightsAndFeatureMatching) {
  const LossWeights lw;
  EXPECT_EQ(lw.adv, 1.0);
  EXPECT_EQ(lw.spec, 45.0);
  EXPECT_EQ(lw.fm, 2.0);
  const auto wav = random_wave(4096, 18);
  std::vector<DiscOutput<double>> real(8, stub(1.0, {{0.0, 0.0}})), fake(8, stub(1.0, {{1.0, 0.0}}));
  EXPECT_NEAR(generator_loss<double>(wav, wav, real, fake).fm, 8 * 0.5, 1e-12);
  std::vector<DiscOutput<double>> short_ensemble(3, stub(1.0, {}));
  EXPECT_THROW(generator_loss<double>(wav, wav, real, short_ensemble), Error);
}

TEST(WeightsIo, RoundTripIsBitIdentical) {
  const auto w = init_weights(vocoder_manifest(VocoderConfig::toy()), 19);
  EXPECT_EQ(decode_lvwt(encode_lvwt(w)), w);
  const auto path = (std::filesystem::temp_directory_path() / "lavoce_nn_rt.lvwt").string();
  save_weights(path, w, to_json(VocoderConfig::toy()));
  EXPECT_EQ(load_weights(path), w);
  EXPECT_EQ(vocoder_config_from_json(load_sidecar(path)), VocoderConfig::toy());
}

TEST(WeightsIo, MissingTensorIsNamed) {
  const auto cfg = EnhancerConfig::micro();
  const auto full = init_weights(enhancer_manifest(cfg), 20);
  TensorBundle partial;
  for (const auto& [name, t] : full) {
    if (name != "decoder.bias") partial.add(name, t);
  }
  try {
    enhance(random_mel(4, cfg.n_mels, 1), nullptr, partial, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kShapeManifestMismatch);
    EXPECT_NE(std::string(e.what()).find("decoder.bias"), std::string::npos);
  }
}

TEST(WeightsIo, TruncatedFileIsRejected) {
  auto bytes = encode_lvwt(init_weights(enhancer_manifest(EnhancerConfig::micro()), 21));
  bytes.resize(bytes.size() - 3);
  try {
    decode_lvwt(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kBadMagic);
  }
  std::vector<std::uint8_t> junk{'N', 'O', 'P', 'E', 0, 0, 0, 0};
  EXPECT_THROW(decode_lvwt(junk), Error);
}

TEST(Config, StrictJsonRejectsUnknownKeys) {
  auto j = to_json(EnhancerConfig::toy());
  EXPECT_EQ(enhancer_config_from_json(j), EnhancerConfig::toy());
  j["n_layer"] = 3;
  try {
    enhancer_config_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidArgument);
  }
}

TEST(Gradcheck, EnhancerLossLinearWeights) {
  const auto cfg = EnhancerConfig::toy();
  const auto w = init_weights(enhancer_manifest(cfg), 22);
  const auto clip = random_clip(4, 23);
  const auto noisy = random_mel(10, cfg.n_mels, 24), clean = random_mel(10, cfg.n_mels, 25);
  auto loss = [&](const auto& b) {
    using T = typename std::remove_cvref_t<decltype(b)>::value_type;
    return enhancer_loss<T>(enhancer_forward<T>(noisy.template cast<T>(), &clip, b, cfg), clean.template cast<T>());
  };
  const auto r = finite_diff_gradcheck(loss, w, 12, 26);
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(Gradcheck, ZeroDirectionIsExact) {
  const auto cfg = EnhancerConfig::micro();
  const auto w = init_weights(enhancer_manifest(cfg), 27);
  const auto pair = synthetic_mel_pair(6, cfg.n_mels, 28);
  auto loss = [&](const auto& b) {
    using T = typename std::remove_cvref_t<decltype(b)>::value_type;
    return enhancer_loss<T>(enhancer_forward<T>(pair.noisy.template cast<T>(), nullptr, b, cfg), pair.clean.template cast<T>());
  };
  TensorBundle zero;
  for (const auto& [name, t] : w) zero.add(name, Tensor(t.shape));
  EXPECT_EQ(check_direction(loss, w, zero), 0.0);
}

TEST(Gradcheck, StepSweepHasInteriorMinimum) {
  const auto cfg = EnhancerConfig::micro();
  const auto w = init_weights(enhancer_manifest(cfg), 29);
  const auto pair = synthetic_mel_pair(6, cfg.n_mels, 30);
  auto loss = [&](const auto& b) {
    using T = typename std::remove_cvref_t<decltype(b)>::value_type;
    using std::tanh;
    // smooth surrogate so truncation error dominates at large steps
    const Mat<T> y = enhancer_forward<T>(pair.noisy.template cast<T>(), nullptr, b, cfg);
    T acc(0.0);
    for (Index i = 0; i < y.size(); ++i) acc += tanh(y.data()[i]) * tanh(y.data()[i]);
    return acc;
  };
  const auto dir = unit_direction(w, "layers.0.ff.w1.weight", 3);
  const auto e = step_sweep(loss, w, dir, {1e-3, 1e-4, 1e-5});
  EXPECT_LT(e[1], e[0]);
  EXPECT_LT(e[1], e[2]);
}

TEST(Gradcheck, NonFiniteLossThrows) {
  const auto w = init_weights(enhancer_manifest(EnhancerConfig::micro()), 31);
  auto loss = [](const auto& b) {
    using T = typename std::remove_cvref_t<decltype(b)>::value_type;
    return T(std::nan(""));
  };
  try {
    finite_diff_gradcheck(loss, w, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNonFiniteLoss);
  }
}

TEST(Gradcheck, SecantConsistency) {
  const auto w = init_weights(enhancer_manifest(EnhancerConfig::micro()), 32);
  auto loss = [](const TensorBundle& b) {
    double acc = 0.0;
    for (const auto& [name, t] : b) {
      for (double v : t.data) acc += std::sin(3.0 * v);
    }
    return acc;
  };
  EXPECT_LT(secant_gradcheck(loss, w, 10, 33).max_rel_error, 1e-4);
}

TEST(MicroTrain, DeterministicAndFlatAtZeroRate) {
  MicroTrainOptions opt;
  opt.steps = 5;
  const auto a = micro_train_demo(1, opt), b = micro_train_demo(1, opt);
  EXPECT_EQ(a.losses, b.losses);
  ASSERT_EQ(a.losses.size(), 6u);
  opt.learning_rate = 0.0;
  const auto flat = micro_train_demo(1, opt);
  for (double l : flat.losses) EXPECT_EQ(l, flat.losses.front());
}

TEST(MicroTrain, LossFallsWithinBudget) {
  const auto r = micro_train_demo(3);
  ASSERT_EQ(r.losses.size(), 201u);
  EXPECT_LE(r.n_params, 500u);
  EXPECT_LE(r.losses.back(), 0.7 * r.losses.front());
}

TEST(Gradcheck, GeneratorLossVocoderConvs) {
  const auto cfg = VocoderConfig::toy();
  const auto gw = init_weights(vocoder_manifest(cfg), 34);
  const auto dw = init_weights(discriminator_manifest(cfg), 35);
  const auto mel = random_mel(4, cfg.n_mels, 36);
  const auto clean = random_wave(4 * cfg.hop, 37);
  auto loss = [&](const auto& b) {
    using T = typename std::remove_cvref_t<decltype(b)>::value_type;
    const auto d = dw.template cast<T>();
    const std::vector<T> c(clean.begin(), clean.end());
    const auto g = vocoder_forward<T>(mel.template cast<T>(), b, cfg);
    return generator_loss<T>(c, g, discriminate(c, d, cfg), discriminate(g, d, cfg)).total;
  };
  EXPECT_LT(finite_diff_gradcheck(loss, gw, 8, 38).max_rel_error, 1e-4);
}

}  // namespace
}  // namespace lavoce::nn
