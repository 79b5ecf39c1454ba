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

#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lavoce/core/dual.hpp"
#include "lavoce/core/error.hpp"

namespace lavoce::nn {

using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
  return out + "]";
}

template <class T>
struct BasicTensor {
  using value_type = T;

  Shape shape;
  std::vector<T> data;

  BasicTensor() = default;
  explicit BasicTensor(Shape s) : shape(std::move(s)), data(element_count(shape), T(0.0)) {}
  BasicTensor(Shape s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != element_count(shape)) {
      throw Error(Errc::kShapeMismatch, "tensor data length " + std::to_string(data.size()) + " != shape " +
                                            shape_string(shape));
    }
  }

  std::size_t size() const { return data.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }
  bool operator==(const BasicTensor&) const = default;
};

/// Named tensors in insertion order.
template <class T>
class BasicTensorBundle {
 public:
  using Tensor = BasicTensor<T>;
  using value_type = T;

  void add(const std::string& name, Tensor t) {
    if (index_.count(name)) throw Error(Errc::kInvalidArgument, "duplicate tensor name '" + name + "'");
    index_[name] = entries_.size();
    entries_.emplace_back(name, std::move(t));
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const Tensor& get(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw Error(Errc::kShapeManifestMismatch, "missing tensor '" + name + "'");
    return entries_[it->second].second;
  }
  Tensor& get(const std::string& name) {
    return const_cast<Tensor&>(static_cast<const BasicTensorBundle&>(*this).get(name));
  }

  /// The tensor, checked against an expected shape.
  const Tensor& get(const std::string& name, const Shape& expected) const {
    const Tensor& t = get(name);
    if (t.shape != expected) {
      throw Error(Errc::kShapeManifestMismatch,
                  "tensor '" + name + "' has shape " + shape_string(t.shape) + ", expected " + shape_string(expected));
    }
    return t;
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : entries_) n += t.size();
    return n;
  }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }

  bool operator==(const BasicTensorBundle& o) const { return entries_ == o.entries_; }

  template <class U>
  BasicTensorBundle<U> cast() const {
    BasicTensorBundle<U> out;
    for (const auto& [name, t] : entries_) {
      BasicTensor<U> u;
      u.shape = t.shape;
      u.data.reserve(t.size());
      for (const auto& v : t.data) u.data.push_back(U(value_of(v)));
      out.add(name, std::move(u));
    }
    return out;
  }

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

using Tensor = BasicTensor<double>;
using TensorBundle = BasicTensorBundle<double>;

/// How a manifest entry is initialized and whether it is trainable.
enum class ParamKind {
  kConvWeight,   ///< Normal(0, 0.01)
  kLinearWeight, ///< U(+-1/sqrt(fan_in))
  kBias,         ///< U(+-1/sqrt(fan_in))
  kPosBias,      ///< U(+-1/sqrt(fan_in)), fan_in = head dim
  kOnes,         ///< norm gains
  kZeros,        ///< norm shifts
  kRunningMean,  ///< buffer, zeros
  kRunningVar,   ///< buffer, ones
};

struct ManifestEntry {
  std::string name;
  Shape shape;
  ParamKind kind = ParamKind::kConvWeight;
  std::size_t fan_in = 1;

  bool trainable() const { return kind != ParamKind::kRunningMean && kind != ParamKind::kRunningVar; }
};

/// Expected tensor names and shapes for one model configuration.
struct ShapeManifest {
  std::vector<ManifestEntry> entries;

  void add(std::string name, Shape s, ParamKind kind, std::size_t fan_in = 1) {
    entries.push_back({std::move(name), std::move(s), kind, fan_in});
  }

  std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += element_count(e.shape);
    return n;
  }

  std::size_t trainable_count() const {
    std::size_t n = 0;
    for (const auto& e : entries) {
      if (e.trainable()) n += element_count(e.shape);
    }
    return n;
  }

  /// Every entry must be present with the declared shape, and nothing else.
  template <class T>
  void validate(const BasicTensorBundle<T>& b) const {
    for (const auto& e : entries) b.get(e.name, e.shape);
    if (b.size() != entries.size()) {
      for (const auto& [name, t] : b) {
        bool known = false;
        for (const auto& e : entries) known = known || e.name == name;
        if (!known) throw Error(Errc::kShapeManifestMismatch, "unexpected tensor '" + name + "'");
      }
    }
  }
};

}  // namespace lavoce::nn
