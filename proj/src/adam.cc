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

#include "skillmpc/adam.h"

#include <cmath>
#include <limits>
#include <string>

#include "skillmpc/error.h"

namespace skillmpc {

void Adam::Step(std::span<Matrix* const> params,
                std::span<const Matrix* const> grads) {
  if (params.size() != grads.size()) {
    throw DimensionError("Adam: " + std::to_string(params.size()) +
                         " parameters but " + std::to_string(grads.size()) +
                         " gradients");
  }
  if (step_count_ == std::numeric_limits<std::int64_t>::max()) {
    throw InvalidArgument("Adam: step counter exhausted");
  }
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) {
    throw DimensionError("Adam: parameter count changed between steps");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    if (p.rows() != g.rows() || p.cols() != g.cols() ||
        p.rows() != m_[i].rows() || p.cols() != m_[i].cols()) {
      throw DimensionError("Adam: shape mismatch at parameter " +
                           std::to_string(i));
    }
  }

  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const double c1 = 1.0 - std::pow(options_.beta1, t);
  const double c2 = 1.0 - std::pow(options_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = *grads[i];
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
    v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * g.cwiseProduct(g);
    Matrix& p = *params[i];
    p.array() -= options_.learning_rate * (m_[i].array() / c1) /
                 ((v_[i].array() / c2).sqrt() + options_.epsilon);
  }
}

void Adam::Step(std::span<Parameter* const> params) {
  std::vector<Matrix*> values;
  std::vector<const Matrix*> grads;
  for (Parameter* p : params) {
    if (p->grad.size() == 0) p->ZeroGrad();
    values.push_back(&p->value);
    grads.push_back(&p->grad);
  }
  Step(values, grads);
}

}  // namespace skillmpc
