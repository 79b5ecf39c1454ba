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

// Forward-mode dual numbers. A value carries one tangent component, so a
// single forward pass yields the exact directional derivative of any
// function built from the operations below.

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <type_traits>

#include <Eigen/Core>

namespace lavoce {

struct Dual {
  double v = 0.0;
  double d = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT: implicit on purpose
  constexpr Dual(double value, double tangent) : v(value), d(tangent) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v /= o.v;
    return *this;
  }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
inline Dual operator+(const Dual& a) { return a; }

inline bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
inline bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }
inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }

inline Dual abs(const Dual& a) { return a.v < 0 ? -a : a; }
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return {s, s > 0 ? a.d / (2.0 * s) : 0.0};
}
inline Dual exp(const Dual& a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
inline Dual tanh(const Dual& a) {
  const double t = std::tanh(a.v);
  return {t, (1.0 - t * t) * a.d};
}
inline Dual erf(const Dual& a) {
  return {std::erf(a.v),
          2.0 / std::sqrt(std::numbers::pi) * std::exp(-a.v * a.v) * a.d};
}
inline bool isfinite(const Dual& a) {
  return std::isfinite(a.v) && std::isfinite(a.d);
}

inline std::ostream& operator<<(std::ostream& os, const Dual& a) {
  return os << a.v << "+" << a.d << "e";
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

template <class T>
inline constexpr bool is_dual_v = std::is_same_v<std::remove_cvref_t<T>, Dual>;

}  // namespace lavoce

namespace Eigen {

template <>
struct NumTraits<lavoce::Dual> : GenericNumTraits<lavoce::Dual> {
  using Real = lavoce::Dual;
  using NonInteger = lavoce::Dual;
  using Nested = lavoce::Dual;
  using Literal = lavoce::Dual;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 2,
    MulCost = 3,
  };
  static inline Real epsilon() { return std::numeric_limits<double>::epsilon(); }
  static inline Real dummy_precision() { return 1e-12; }
  static inline Real highest() { return std::numeric_limits<double>::max(); }
  static inline Real lowest() { return std::numeric_limits<double>::lowest(); }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

}  // namespace Eigen
