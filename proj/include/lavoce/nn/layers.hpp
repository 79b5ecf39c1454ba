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
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lavoce/core/dual.hpp"
#include "lavoce/core/kink.hpp"
#include "lavoce/core/error.hpp"
#include "lavoce/nn/tensor.hpp"

namespace lavoce::nn {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Index = Eigen::Index;

template <class T>
Eigen::Map<const RowMat<T>> as_matrix(const BasicTensor<T>& t, std::size_t rows) {
  return {t.data.data(), static_cast<Index>(rows), static_cast<Index>(t.size() / rows)};
}

inline Index idx(std::size_t v) { return static_cast<Index>(v); }

/// Output length of a strided, dilated, padded convolution.
inline std::size_t conv_out_len(std::size_t len, std::size_t k, std::size_t stride, std::size_t pad,
                                std::size_t dilation = 1) {
  const std::size_t span = dilation * (k - 1) + 1;
  if (len + 2 * pad < span) {
    throw Error(Errc::kTooShort, "input of length " + std::to_string(len) + " shorter than kernel span " +
                                     std::to_string(span));
  }
  return (len + 2 * pad - span) / stride + 1;
}

/// x: C_in x L (channels by time), w: [C_out, C_in/groups, K]. Zero padding.
template <class T>
Mat<T> conv1d(const Mat<T>& x, const BasicTensor<T>& w, const BasicTensor<T>* bias, std::size_t stride,
              std::size_t pad, std::size_t dilation = 1, std::size_t groups = 1) {
  const std::size_t c_out = w.dim(0), cg_in = w.dim(1), k = w.dim(2);
  const std::size_t c_in = static_cast<std::size_t>(x.rows());
  if (cg_in * groups != c_in || c_out % groups != 0) {
    throw Error(Errc::kShapeMismatch, "conv1d: input has " + std::to_string(c_in) + " channels, weight expects " +
                                          std::to_string(cg_in * groups));
  }
  const std::size_t len = static_cast<std::size_t>(x.cols());
  const std::size_t out_len = conv_out_len(len, k, stride, pad, dilation);
  const std::size_t cg_out = c_out / groups;
  const auto wm = as_matrix(w, c_out);
  Mat<T> y(idx(c_out), idx(out_len));
  Mat<T> cols(idx(cg_in * k), idx(out_len));
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t c = 0; c < cg_in; ++c) {
      for (std::size_t j = 0; j < k; ++j) {
        const Index row = idx(c * k + j);
        for (std::size_t t = 0; t < out_len; ++t) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t * stride + j * dilation) - static_cast<std::ptrdiff_t>(pad);
          cols(row, idx(t)) = (src >= 0 && src < static_cast<std::ptrdiff_t>(len)) ? x(idx(g * cg_in + c), src) : T(0.0);
        }
      }
    }
    y.middleRows(idx(g * cg_out), idx(cg_out)).noalias() = wm.middleRows(idx(g * cg_out), idx(cg_out)) * cols;
  }
  if (bias) {
    for (std::size_t c = 0; c < c_out; ++c) y.row(idx(c)).array() += bias->data[c];
  }
  return y;
}

/// x: C_in x L, w: [C_in, C_out, K]. Output length (L - 1) s - 2 p + K.
template <class T>
Mat<T> conv_transpose1d(const Mat<T>& x, const BasicTensor<T>& w, const BasicTensor<T>* bias, std::size_t stride,
                        std::size_t pad) {
  const std::size_t c_in = w.dim(0), c_out = w.dim(1), k = w.dim(2);
  if (static_cast<std::size_t>(x.rows()) != c_in) {
    throw Error(Errc::kShapeMismatch, "conv_transpose1d: channel mismatch");
  }
  const std::size_t len = static_cast<std::size_t>(x.cols());
  const std::size_t full = (len - 1) * stride + k;
  if (full < 2 * pad + 1) throw Error(Errc::kTooShort, "conv_transpose1d: output would be empty");
  const std::size_t out_len = full - 2 * pad;
  const Mat<T> z = as_matrix(w, c_in).transpose() * x;  // (C_out K) x L
  Mat<T> y = Mat<T>::Zero(idx(c_out), idx(out_len));
  for (std::size_t co = 0; co < c_out; ++co) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t l = 0; l < len; ++l) {
        const std::ptrdiff_t o = static_cast<std::ptrdiff_t>(l * stride + j) - static_cast<std::ptrdiff_t>(pad);
        if (o >= 0 && o < static_cast<std::ptrdiff_t>(out_len)) y(idx(co), o) += z(idx(co * k + j), idx(l));
      }
    }
  }
  if (bias) {
    for (std::size_t c = 0; c < c_out; ++c) y.row(idx(c)).array() += bias->data[c];
  }
  return y;
}

/// One image per channel: x is C x (H W), row-major pixels.
template <class T>
struct FeatureMap {
  Mat<T> data;
  std::size_t height = 0, width = 0;
  std::size_t channels() const { return static_cast<std::size_t>(data.rows()); }
};

/// w: [C_out, C_in, kh, kw], square stride/padding, no groups.
template <class T>
FeatureMap<T> conv2d(const FeatureMap<T>& x, const BasicTensor<T>& w, const BasicTensor<T>* bias, std::size_t stride,
                     std::size_t pad) {
  const std::size_t c_out = w.dim(0), c_in = w.dim(1), kh = w.dim(2), kw = w.dim(3);
  if (x.channels() != c_in) throw Error(Errc::kShapeMismatch, "conv2d: channel mismatch");
  FeatureMap<T> y;
  y.height = conv_out_len(x.height, kh, stride, pad);
  y.width = conv_out_len(x.width, kw, stride, pad);
  const std::size_t n = y.height * y.width;
  Mat<T> cols(idx(c_in * kh * kw), idx(n));
  for (std::size_t c = 0; c < c_in; ++c) {
    for (std::size_t a = 0; a < kh; ++a) {
      for (std::size_t b = 0; b < kw; ++b) {
        const Index row = idx((c * kh + a) * kw + b);
        for (std::size_t oy = 0; oy < y.height; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride + a) - static_cast<std::ptrdiff_t>(pad);
          for (std::size_t ox = 0; ox < y.width; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride + b) - static_cast<std::ptrdiff_t>(pad);
            const bool inside = iy >= 0 && ix >= 0 && iy < static_cast<std::ptrdiff_t>(x.height) &&
                                ix < static_cast<std::ptrdiff_t>(x.width);
            cols(row, idx(oy * y.width + ox)) = inside ? x.data(idx(c), iy * static_cast<std::ptrdiff_t>(x.width) + ix) : T(0.0);
          }
        }
      }
    }
  }
  y.data.noalias() = as_matrix(w, c_out) * cols;
  if (bias) {
    for (std::size_t c = 0; c < c_out; ++c) y.data.row(idx(c)).array() += bias->data[c];
  }
  return y;
}

/// Inference-mode batch norm over the rows (channels) of x.
template <class T>
void batch_norm_inplace(Mat<T>& x, const BasicTensor<T>& gamma, const BasicTensor<T>& beta, const BasicTensor<T>& mean,
                        const BasicTensor<T>& var, double eps = 1e-5) {
  using std::sqrt;
  for (Index c = 0; c < x.rows(); ++c) {
    const std::size_t i = static_cast<std::size_t>(c);
    const T scale = gamma.data[i] / sqrt(var.data[i] + T(eps));
    const T shift = beta.data[i] - mean.data[i] * scale;
    for (Index t = 0; t < x.cols(); ++t) x(c, t) = x(c, t) * scale + shift;
  }
}

template <class T>
FeatureMap<T> max_pool2d(const FeatureMap<T>& x, std::size_t k, std::size_t stride, std::size_t pad) {
  FeatureMap<T> y;
  y.height = conv_out_len(x.height, k, stride, pad);
  y.width = conv_out_len(x.width, k, stride, pad);
  y.data.resize(x.data.rows(), idx(y.height * y.width));
  for (Index c = 0; c < x.data.rows(); ++c) {
    for (std::size_t oy = 0; oy < y.height; ++oy) {
      for (std::size_t ox = 0; ox < y.width; ++ox) {
        bool any = false;
        T best(0.0);
        std::uint32_t arg = 0, n = 0;
        for (std::size_t a = 0; a < k; ++a) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride + a) - static_cast<std::ptrdiff_t>(pad);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(x.height)) continue;
          for (std::size_t b = 0; b < k; ++b) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride + b) - static_cast<std::ptrdiff_t>(pad);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(x.width)) continue;
            const T& v = x.data(c, iy * static_cast<std::ptrdiff_t>(x.width) + ix);
            if (!any || v > best) {
              best = v;
              arg = n;
            }
            any = true;
            ++n;
          }
        }
        note_branch(arg);
        y.data(c, idx(oy * y.width + ox)) = best;
      }
    }
  }
  return y;
}

template <class T>
void relu_inplace(Mat<T>& x) {
  for (Index i = 0; i < x.size(); ++i) {
    const bool neg = x.data()[i] < T(0.0);
    note_branch(neg);
    if (neg) x.data()[i] = T(0.0);
  }
}

template <class T>
void leaky_relu_inplace(Mat<T>& x, double slope) {
  for (Index i = 0; i < x.size(); ++i) {
    const bool neg = x.data()[i] < T(0.0);
    note_branch(neg);
    if (neg) x.data()[i] *= T(slope);
  }
}

template <class T>
T gelu(const T& x) {
  using std::erf;
  return T(0.5) * x * (T(1.0) + erf(x / T(std::numbers::sqrt2)));
}

/// x: N x in (one row per item), w: [out, in].
template <class T>
Mat<T> linear(const Mat<T>& x, const BasicTensor<T>& w, const BasicTensor<T>* bias) {
  const std::size_t out = w.dim(0), in = w.dim(1);
  if (static_cast<std::size_t>(x.cols()) != in) {
    throw Error(Errc::kShapeMismatch, "linear: input width " + std::to_string(x.cols()) + ", weight expects " +
                                          std::to_string(in));
  }
  Mat<T> y = x * as_matrix(w, out).transpose();
  if (bias) {
    for (std::size_t o = 0; o < out; ++o) y.col(idx(o)).array() += bias->data[o];
  }
  return y;
}

/// Row-wise layer norm.
template <class T>
Mat<T> layer_norm(const Mat<T>& x, const BasicTensor<T>& gamma, const BasicTensor<T>& beta, double eps = 1e-5) {
  using std::sqrt;
  Mat<T> y(x.rows(), x.cols());
  const T n(static_cast<double>(x.cols()));
  for (Index r = 0; r < x.rows(); ++r) {
    T mean(0.0);
    for (Index c = 0; c < x.cols(); ++c) mean += x(r, c);
    mean /= n;
    T var(0.0);
    for (Index c = 0; c < x.cols(); ++c) var += (x(r, c) - mean) * (x(r, c) - mean);
    var /= n;
    const T inv = T(1.0) / sqrt(var + T(eps));
    for (Index c = 0; c < x.cols(); ++c) {
      y(r, c) = (x(r, c) - mean) * inv * gamma.data[static_cast<std::size_t>(c)] + beta.data[static_cast<std::size_t>(c)];
    }
  }
  return y;
}

/// Numerically stable row softmax.
template <class T>
void softmax_rows_inplace(Mat<T>& x) {
  using std::exp;
  for (Index r = 0; r < x.rows(); ++r) {
    T mx = x(r, 0);
    for (Index c = 1; c < x.cols(); ++c) {
      if (x(r, c) > mx) mx = x(r, c);
    }
    T sum(0.0);
    for (Index c = 0; c < x.cols(); ++c) {
      x(r, c) = exp(x(r, c) - mx);
      sum += x(r, c);
    }
    for (Index c = 0; c < x.cols(); ++c) x(r, c) /= sum;
  }
}

template <class T>
bool all_finite(const Mat<T>& x) {
  using lavoce::isfinite;
  using std::isfinite;
  for (Index i = 0; i < x.size(); ++i) {
    if (!isfinite(x.data()[i])) return false;
  }
  return true;
}

template <class T>
void require_finite(const Mat<T>& x, const char* where) {
  if (!all_finite(x)) throw Error(Errc::kNonFiniteActivation, std::string("non-finite activation in ") + where);
}

}  // namespace lavoce::nn
