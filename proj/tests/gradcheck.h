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

// Randomized reverse-mode vs central-difference gradient checks, shared by
// the unit tests and the acceptance binary.

#ifndef SKILLMPC_TESTS_GRADCHECK_H_
#define SKILLMPC_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skillmpc/autodiff.h"
#include "skillmpc/mlp.h"
#include "skillmpc/rng.h"

namespace skillmpc::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kGradRelTol = 1e-4;
inline constexpr double kGradAbsFloor = 1e-6;

// Relative error with an absolute floor: entries whose absolute difference
// is below kGradAbsFloor always pass.
inline bool GradientsAgree(double analytic, double numeric, double* rel) {
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  *rel = scale > 0 ? diff / scale : 0.0;
  return diff <= kGradAbsFloor || *rel <= kGradRelTol;
}

inline constexpr int kLossKinds = 9;

// Scalar loss over a network output y (B x O) and the input x (B x I).
inline Var BuildLoss(int kind, Var y, Var x, const Matrix& target) {
  Tape& t = *y.tape();
  switch (kind) {
    case 0:
      return Scale(Sum(Square(y)), 0.5);
    case 1:
      return Add(Mean(Tanh(y)), Sum(Softplus(y)));
    case 2:
      return Sum(LogSumExpRows(y));
    case 3:
      return Scale(Sum(Mul(LogSoftmaxRows(y), t.Constant(target))), -1.0);
    case 4:
      return Sum(Mul(SoftmaxRows(y), t.Constant(target)));
    case 5:
      return Sum(Log(AddScalar(Exp(y), 1.0)));
    case 6:
      return Sum(Square(MulCol(y, SliceCols(Tanh(y), 0, 1))));
    case 7: {
      Var both = ConcatCols({y, Scale(x, 0.5)});
      return Mean(Square(Sub(both, t.Constant(Matrix::Constant(both.rows(), both.cols(), 0.3)))));
    }
    default: {
      Var scaled = MulCol(Exp(Scale(x, 0.2)), SliceCols(y, 0, 1));
      Var mixed = MatMul(scaled, t.Constant(Matrix::Ones(x.cols(), 2)));
      return Add(Sum(Clamp(y, -0.7, 0.7)), Scale(Sum(AddRow(mixed, t.Constant(Matrix::Ones(1, 2)))), 0.1));
    }
  }
}

struct GradCheckSummary {
  int configurations = 0;
  long entries = 0;
  long failures = 0;
  double worst_rel = 0.0;
  std::string worst_where;
};

// Runs `count` configurations: random architecture, batch, input and loss
// kind. Every parameter entry and every input entry is compared against a
// central difference with step kFdStep.
inline GradCheckSummary RunGradientChecks(int count, std::uint64_t seed) {
  GradCheckSummary summary;
  RngStream rng(seed, 0);
  for (int c = 0; c < count; ++c) {
    const int in = 1 + rng.UniformInt(4);
    const int out = 2 + rng.UniformInt(4);
    const int hidden = rng.UniformInt(3);
    std::vector<int> sizes{in};
    for (int h = 0; h < hidden; ++h) sizes.push_back(1 + rng.UniformInt(6));
    sizes.push_back(out);
    const int batch = 1 + rng.UniformInt(4);
    const int kind = c % kLossKinds;
    Mlp net(sizes, rng, "check");
    // Non-zero biases so ReLU kinks are not hit at exactly zero.
    for (int l = 0; l < net.num_layers(); ++l) {
      for (Eigen::Index j = 0; j < net.bias(l).value.size(); ++j) {
        net.bias(l).value(j) = rng.Normal(0.0, 0.3);
      }
    }
    Parameter input{"input", Matrix(batch, in), Matrix()};
    for (Eigen::Index j = 0; j < input.value.size(); ++j) input.value(j) = rng.Normal();
    Matrix target(batch, out);
    for (int b = 0; b < batch; ++b) {
      Vector p(out);
      for (int o = 0; o < out; ++o) p[o] = rng.Uniform(0.1, 1.0);
      target.row(b) = (p / p.sum()).transpose();
    }

    auto loss_value = [&]() {
      Tape tape;
      Var x = tape.Constant(input.value);
      return BuildLoss(kind, net.ForwardFrozen(tape, x), x, target).value()(0, 0);
    };
    Tape tape;
    net.ZeroGrad();
    input.ZeroGrad();
    Var x = tape.Param(input);
    tape.Backward(BuildLoss(kind, net.Forward(tape, x), x, target));

    std::vector<Parameter*> params = net.Parameters();
    params.push_back(&input);
    for (Parameter* p : params) {
      for (Eigen::Index j = 0; j < p->value.size(); ++j) {
        const double saved = p->value(j);
        p->value(j) = saved + kFdStep;
        const double up = loss_value();
        p->value(j) = saved - kFdStep;
        const double down = loss_value();
        p->value(j) = saved;
        const double numeric = (up - down) / (2 * kFdStep);
        double rel = 0.0;
        const bool ok = GradientsAgree(p->grad(j), numeric, &rel);
        ++summary.entries;
        if (!ok) ++summary.failures;
        if (!ok && rel > summary.worst_rel) {
          summary.worst_rel = rel;
          summary.worst_where = "config " + std::to_string(c) + " loss " +
                                std::to_string(kind) + " " + p->name + "[" +
                                std::to_string(j) + "]";
        }
      }
    }
    ++summary.configurations;
  }
  return summary;
}

}  // namespace skillmpc::testing

#endif  // SKILLMPC_TESTS_GRADCHECK_H_
