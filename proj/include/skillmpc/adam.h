// Copyright 2026 The skillmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SKILLMPC_ADAM_H_
#define SKILLMPC_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "skillmpc/autodiff.h"

namespace skillmpc {

inline constexpr double kDefaultLearningRate = 3e-4;

struct AdamOptions {
  double learning_rate = kDefaultLearningRate;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moment arrays are sized on the first step and
// must keep matching the parameter shapes afterwards.
class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamOptions options) : options_(options) {}

  const AdamOptions& options() const { return options_; }
  std::int64_t step_count() const { return step_count_; }

  // Applies one update to `params` using `grads` (same count and shapes).
  void Step(std::span<Matrix* const> params, std::span<const Matrix* const> grads);
  // Convenience: uses each parameter's own grad.
  void Step(std::span<Parameter* const> params);

  // Moments, exposed for checkpointing.
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  void set_step_count(std::int64_t n) { step_count_ = n; }

 private:
  AdamOptions options_;
  std::int64_t step_count_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace skillmpc

#endif  // SKILLMPC_ADAM_H_
