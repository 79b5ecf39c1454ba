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
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "lavoce/core/dual.hpp"
#include "lavoce/core/kink.hpp"
#include "lavoce/core/random.hpp"
#include "lavoce/nn/tensor.hpp"

namespace lavoce::nn {

inline constexpr double kDefaultFdStep = 1e-4;
inline constexpr double kGradFloor = 1e-8;
/// Relative accuracy the probes are held to.
inline constexpr double kFdRelTolerance = 1e-4;
/// Rounding error allowed in one loss evaluation, in ulps of |L|.
inline constexpr double kRoundoffUlps = 32.0;

inline double relative_error(double a, double b, double floor = kGradFloor) {
  const double den = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / den;
}

/// Smallest derivative a central difference with step h can resolve to
/// kFdRelTolerance when evaluating L carries kRoundoffUlps of rounding
/// error; below it derivatives are compared absolutely.
inline double fd_resolution(double loss, double h) {
  const double roundoff = kRoundoffUlps * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(loss)) / h;
  return std::max(kGradFloor, roundoff / kFdRelTolerance);
}

struct ProbeResult {
  std::string tensor;
  std::size_t index = 0;
  double numeric = 0.0;
  double analytic = 0.0;
  double rel_error = 0.0;
  double floor = kGradFloor;
};

struct GradcheckResult {
  double max_rel_error = 0.0;
  std::vector<ProbeResult> probes;
  std::size_t kink_redraws = 0;  ///< probes discarded because the step crossed a kink
};

/// Redraws allowed per probe before a kink-crossing probe is kept anyway.
inline constexpr std::size_t kMaxKinkRedraws = 32;

/// Linear and convolution weights: the probes the check targets by default.
inline bool is_weight_matrix(const std::string& name, const Tensor& t) {
  return t.shape.size() >= 2 && name.size() > 7 && name.compare(name.size() - 7, 7, ".weight") == 0;
}

namespace detail {

inline double checked(double v) {
  if (!std::isfinite(v)) throw Error(Errc::kNonFiniteLoss, "loss evaluated to a non-finite value");
  return v;
}

inline TensorBundle shifted(const TensorBundle& params, const TensorBundle& dir, double h) {
  TensorBundle out = params;
  auto it = dir.begin();
  for (auto& [name, t] : out) {
    const auto& d = (it++)->second;
    for (std::size_t i = 0; i < t.size(); ++i) t.data[i] += h * d.data[i];
  }
  return out;
}

inline bool is_zero(const TensorBundle& dir) {
  for (const auto& [name, t] : dir) {
    for (double v : t.data) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Central difference (L(p + h d) - L(p - h d)) / 2h.
template <class Loss>
double fd_directional(Loss& loss, const TensorBundle& params, const TensorBundle& dir, double h) {
  const double up = detail::checked(value_of(loss(detail::shifted(params, dir, h))));
  const double down = detail::checked(value_of(loss(detail::shifted(params, dir, -h))));
  return (up - down) / (2.0 * h);
}

/// True when L(p + h d), L(p) and L(p - h d) take identical branches at
/// every ReLU, max, abs and clamp, so the central difference sees one
/// smooth piece.
template <class Loss>
bool same_smooth_piece(Loss& loss, const TensorBundle& params, const TensorBundle& dir, double h) {
  auto branches = [&](const TensorBundle& b) {
    KinkRecorder rec;
    detail::checked(value_of(loss(b)));
    return rec.branches();
  };
  const auto mid = branches(params);
  return branches(detail::shifted(params, dir, h)) == mid && branches(detail::shifted(params, dir, -h)) == mid;
}

/// Exact directional derivative by forward-mode dual numbers.
template <class Loss>
double dual_directional(Loss& loss, const TensorBundle& params, const TensorBundle& dir) {
  auto dual = params.template cast<Dual>();
  auto it = dir.begin();
  for (auto& [name, t] : dual) {
    const auto& d = (it++)->second;
    for (std::size_t i = 0; i < t.size(); ++i) t.data[i].d = d.data[i];
  }
  const Dual l = loss(dual);
  if (!isfinite(l)) throw Error(Errc::kNonFiniteLoss, "loss evaluated to a non-finite value");
  return l.d;
}

/// Relative error between central differences and the analytic directional
/// derivative along `dir`; a zero direction is exact by construction.
template <class Loss>
double check_direction(Loss& loss, const TensorBundle& params, const TensorBundle& dir, double h = kDefaultFdStep) {
  if (detail::is_zero(dir)) return 0.0;
  return relative_error(fd_directional(loss, params, dir, h), dual_directional(loss, params, dir));
}

inline TensorBundle unit_direction(const TensorBundle& params, const std::string& tensor, std::size_t index) {
  TensorBundle dir;
  for (const auto& [name, t] : params) {
    Tensor z(t.shape);
    if (name == tensor) z.data.at(index) = 1.0;
    dir.add(name, std::move(z));
  }
  return dir;
}

/// Probes `n_probes` scalar parameters: a tensor is drawn uniformly among
/// those accepted by `filter`, then an element uniformly within it. A probe
/// whose step crosses a kink is redrawn, since no finite difference across a
/// kink approximates the one-sided derivative. `loss` must be callable with
/// both TensorBundle and BasicTensorBundle<Dual>.
template <class Loss>
GradcheckResult finite_diff_gradcheck(Loss&& loss, const TensorBundle& params, std::size_t n_probes, std::uint64_t seed,
                                      double h = kDefaultFdStep,
                                      const std::function<bool(const std::string&, const Tensor&)>& filter = is_weight_matrix) {
  std::vector<std::string> candidates;
  for (const auto& [name, t] : params) {
    if (filter(name, t) && t.size() > 0) candidates.push_back(name);
  }
  if (candidates.empty()) throw Error(Errc::kInvalidArgument, "gradcheck: no parameters match the probe filter");
  Rng rng(seed);
  GradcheckResult r;
  const double floor = fd_resolution(detail::checked(value_of(loss(params))), h);
  for (std::size_t n = 0; n < n_probes; ++n) {
    std::string name;
    std::size_t i = 0;
    TensorBundle dir;
    for (std::size_t attempt = 0;; ++attempt) {
      name = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
      i = std::uniform_int_distribution<std::size_t>(0, params.get(name).size() - 1)(rng);
      dir = unit_direction(params, name, i);
      if (attempt == kMaxKinkRedraws || same_smooth_piece(loss, params, dir, h)) break;
      ++r.kink_redraws;
    }
    ProbeResult p{name, i, fd_directional(loss, params, dir, h), dual_directional(loss, params, dir), 0.0, floor};
    p.rel_error = relative_error(p.numeric, p.analytic, floor);
    r.max_rel_error = std::max(r.max_rel_error, p.rel_error);
    r.probes.push_back(std::move(p));
  }
  return r;
}

/// Error of the central difference at each step size for one direction.
template <class Loss>
std::vector<double> step_sweep(Loss&& loss, const TensorBundle& params, const TensorBundle& dir,
                               const std::vector<double>& steps) {
  const double exact = dual_directional(loss, params, dir);
  std::vector<double> out;
  for (double h : steps) out.push_back(relative_error(fd_directional(loss, params, dir, h), exact));
  return out;
}

/// For losses with no dual-number path: central differences at h and h/2
/// must agree (secant consistency).
inline GradcheckResult secant_gradcheck(const std::function<double(const TensorBundle&)>& loss, const TensorBundle& params,
                                        std::size_t n_probes, std::uint64_t seed, double h = kDefaultFdStep) {
  std::vector<std::string> names;
  for (const auto& [name, t] : params) {
    if (t.size() > 0) names.push_back(name);
  }
  Rng rng(seed);
  GradcheckResult r;
  const double floor = fd_resolution(detail::checked(loss(params)), h);
  for (std::size_t n = 0; n < n_probes; ++n) {
    const auto& name = names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, params.get(name).size() - 1)(rng);
    const auto dir = unit_direction(params, name, i);
    ProbeResult p{name, i, fd_directional(loss, params, dir, h), fd_directional(loss, params, dir, h / 2), 0.0, floor};
    p.rel_error = relative_error(p.numeric, p.analytic, floor);
    r.max_rel_error = std::max(r.max_rel_error, p.rel_error);
    r.probes.push_back(std::move(p));
  }
  return r;
}

}  // namespace lavoce::nn
