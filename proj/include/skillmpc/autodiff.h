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

#ifndef SKILLMPC_AUTODIFF_H_
#define SKILLMPC_AUTODIFF_H_

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace skillmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// A trainable array. Gradients accumulate into `grad` during
// Tape::Backward; callers zero them between steps.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  void ZeroGrad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

// Handle to a node on a tape. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  int rows() const { return static_cast<int>(value().rows()); }
  int cols() const { return static_cast<int>(value().cols()); }
  int id() const { return id_; }
  Tape* tape() const { return tape_; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode recording of a computation over dense matrices. Rows are batch
// entries. Every op checks its output for NaN and raises NumericFault tagged
// with the op name and node index.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that never receives a gradient.
  Var Constant(Matrix value);
  // Leaf whose gradient is accumulated into `param.grad` by Backward.
  Var Param(Parameter& param);

  // Backpropagates from a 1x1 node. Throws InvalidArgument otherwise.
  void Backward(Var loss);

  const Matrix& value(int id) const { return nodes_[id].value; }
  // Gradient of the last Backward call with respect to node `id`. Empty if
  // the node was not on a differentiable path.
  const Matrix& grad(int id) const { return nodes_[id].grad; }
  std::size_t size() const { return nodes_.size(); }

  // Internal: used by the op implementations.
  // Receives the tape and the id of the node being differentiated; reads
  // grad(self) and pushes contributions to its inputs with Accumulate.
  using BackwardFn = std::function<void(Tape&, int self)>;
  Var Push(Matrix value, bool requires_grad, BackwardFn backward,
           const char* op);
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  void Accumulate(int id, const Matrix& g);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
};

// Elementary differentiable ops. Shapes must match exactly except where a
// function name says otherwise (AddRow broadcasts a 1xN row over the batch).
Var MatMul(Var a, Var b);
// x * w + b, with b a 1xN row broadcast over rows of x.
Var Affine(Var x, Var w, Var b);
Var Add(Var a, Var b);
Var AddRow(Var a, Var row);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
// (B x N) * (B x 1): scales each row by a per-row factor.
Var MulCol(Var a, Var col);
Var Scale(Var a, double c);
Var AddScalar(Var a, double c);
Var Relu(Var a);
Var Tanh(Var a);
Var Exp(Var a);
Var Log(Var a);
Var Square(Var a);
Var Softplus(Var a);
// Elementwise clamp; zero gradient where the clamp is active.
Var Clamp(Var a, double lo, double hi);
// Sum of all entries -> 1x1.
Var Sum(Var a);
// Mean of all entries -> 1x1.
Var Mean(Var a);
// Per-row sum -> B x 1.
Var RowSum(Var a);
// Per-row log-sum-exp -> B x 1.
Var LogSumExpRows(Var a);
Var LogSoftmaxRows(Var a);
Var SoftmaxRows(Var a);
Var ConcatCols(const std::vector<Var>& parts);
Var SliceCols(Var a, int start, int count);

}  // namespace skillmpc

#endif  // SKILLMPC_AUTODIFF_H_
