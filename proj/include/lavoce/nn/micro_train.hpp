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
#include <cstdint>
#include <random>
#include <vector>

#include "lavoce/core/random.hpp"
#include "lavoce/nn/enhancer.hpp"
#include "lavoce/nn/losses.hpp"
#include "lavoce/nn/manifest.hpp"

namespace lavoce::nn {

struct MelPair {
  Mat<double> noisy, clean;
};

/// Smooth log-mel-like clean pattern plus seeded Gaussian corruption.
inline MelPair synthetic_mel_pair(std::size_t frames, std::size_t bands, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  MelPair p{Mat<double>(idx(frames), idx(bands)), Mat<double>(idx(frames), idx(bands))};
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t m = 0; m < bands; ++m) {
      const double v = -3.0 + 1.5 * std::sin(0.45 * static_cast<double>(t) + 0.8 * static_cast<double>(m)) -
                       0.2 * static_cast<double>(m);
      p.clean(idx(t), idx(m)) = v;
      p.noisy(idx(t), idx(m)) = v + noise(rng);
    }
  }
  return p;
}

struct MicroTrainOptions {
  std::size_t steps = 200;
  double learning_rate = 0.05;
  double fd_step = 1e-5;
  std::size_t frames = 16;
};

struct MicroTrainResult {
  std::vector<double> losses;  ///< initial loss, then one entry per step
  std::size_t n_params = 0;
};

/// Fits the micro enhancer to one synthetic pair with plain SGD on central
/// finite-difference gradients.
inline MicroTrainResult micro_train_demo(std::uint64_t seed, const MicroTrainOptions& opt = {}) {
  const auto cfg = EnhancerConfig::micro();
  TensorBundle w = init_weights(enhancer_manifest(cfg), seed);
  const auto pair = synthetic_mel_pair(opt.frames, cfg.n_mels, mix_seed(seed, 7));
  auto loss = [&](const TensorBundle& b) {
    return enhancer_loss(enhancer_forward<double>(pair.noisy, nullptr, b, cfg), pair.clean);
  };
  MicroTrainResult r;
  r.n_params = w.parameter_count();
  r.losses.push_back(loss(w));
  std::vector<std::vector<double>> grad;
  for (std::size_t step = 0; step < opt.steps; ++step) {
    grad.clear();
    for (auto& [name, t] : w) {
      std::vector<double> g(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double keep = t.data[i];
        t.data[i] = keep + opt.fd_step;
        const double up = loss(w);
        t.data[i] = keep - opt.fd_step;
        const double down = loss(w);
        t.data[i] = keep;
        g[i] = (up - down) / (2.0 * opt.fd_step);
      }
      grad.push_back(std::move(g));
    }
    std::size_t k = 0;
    for (auto& [name, t] : w) {
      for (std::size_t i = 0; i < t.size(); ++i) t.data[i] -= opt.learning_rate * grad[k][i];
      ++k;
    }
    r.losses.push_back(loss(w));
  }
  return r;
}

}  // namespace lavoce::nn
