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

// Branch recording for piecewise-smooth functions. While a KinkRecorder is
// alive on a thread, every non-differentiable site (ReLU, max, abs, clamp)
// appends the branch it took. Two evaluations with equal logs lie on the
// same smooth piece.

#include <cstdint>
#include <vector>

namespace lavoce {

namespace detail {
inline thread_local std::vector<std::uint32_t>* kink_log = nullptr;
}  // namespace detail

inline void note_branch(std::uint32_t branch) {
  if (detail::kink_log) detail::kink_log->push_back(branch);
}

class KinkRecorder {
 public:
  KinkRecorder() : previous_(detail::kink_log) { detail::kink_log = &log_; }
  ~KinkRecorder() { detail::kink_log = previous_; }
  KinkRecorder(const KinkRecorder&) = delete;
  KinkRecorder& operator=(const KinkRecorder&) = delete;

  const std::vector<std::uint32_t>& branches() const { return log_; }

 private:
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t>* previous_;
};

}  // namespace lavoce
