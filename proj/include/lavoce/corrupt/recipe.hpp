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
#include <random>
#include <string>

#include "lavoce/core/error.hpp"
#include "lavoce/core/random.hpp"

namespace lavoce::corrupt {

/// Target ratios and source counts for one noisy mixture.
struct MixRecipe {
  double snr_db = 0.0;
  double sir_db = 0.0;
  int n_noises = 1;
  int n_interferers = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_noises < 0 || n_interferers < 0 || n_noises + n_interferers < 1) {
      throw Error(Errc::kInvalidArgument, "MixRecipe: need n_noises, n_interferers >= 0 and at least one source");
    }
  }

  bool operator==(const MixRecipe&) const = default;
};

/// Evaluation conditions: 1 (low), 2 (medium), 3 (high) corruption.
inline MixRecipe preset_condition(int id, std::uint64_t seed = 0) {
  switch (id) {
    case 1: return {0.0, 0.0, 1, 1, seed};
    case 2: return {-5.0, -5.0, 3, 2, seed};
    case 3: return {-10.0, -10.0, 5, 3, seed};
    default:
      throw Error(Errc::kUnknownCondition, "noise condition " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
}

inline constexpr double kTrainRatioMinDb = -15.0;
inline constexpr double kTrainRatioMaxDb = 5.0;
inline constexpr int kTrainMaxNoises = 5;
inline constexpr int kTrainMaxInterferers = 3;

/// Training-time sampler: SNR and SIR independently uniform on [-15, 5] dB
/// (continuous), 1..5 noises and 1..3 interferers. The returned seed drives
/// the source alignment of the mix.
inline MixRecipe sample_training_recipe(std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  std::uniform_real_distribution<double> ratio(kTrainRatioMinDb, kTrainRatioMaxDb);
  std::uniform_int_distribution<int> noises(1, kTrainMaxNoises);
  std::uniform_int_distribution<int> interferers(1, kTrainMaxInterferers);
  MixRecipe r;
  r.snr_db = ratio(rng);
  r.sir_db = ratio(rng);
  r.n_noises = noises(rng);
  r.n_interferers = interferers(rng);
  r.seed = mix_seed(rng_seed, 1);
  return r;
}

}  // namespace lavoce::corrupt
