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

#include "skillmpc/autodiff.h"

#include <cmath>
#include <string>
#include <utility>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

std::string Shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void RequireSameShape(const char* op, Var a, Var b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         Shape(a.value()) + " vs " + Shape(b.value()));
  }
}

void RequireSameTape(const char* op, Var a, Var b) {
  if (a.tape() != b.tape() || a.tape() == nullptr) {
    throw InvalidArgument(std::string(op) + ": operands on different tapes");
  }
}

bool AnyGrad(Tape& t, Var a) { return t.requires_grad(a.id()); }
bool AnyGrad(Tape& t, Var a, Var b) {
  return t.requires_grad(a.id()) || t.requires_grad(b.id());
}

// Numerically stable softplus.
double SoftplusScalar(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Generic elementwise unary op: f for the value, df(x, y) for dy/dx.
template <typename F, typename DF>
Var Unary(const char* op, Var a, F f, DF df) {
  Tape& t = *a.tape();
  Matrix out = a.value().unaryExpr(f);
  const int ia = a.id();
  return t.Push(
      std::move(out), AnyGrad(t, a),
      [ia, df](Tape& tape, int self) {
        const Matrix& x = tape.value(ia);
        const Matrix& y = tape.value(self);
        Matrix g = tape.grad(self);
        for (Eigen::Index i = 0; i < g.size(); ++i) {
          g.data()[i] *= df(x.data()[i], y.data()[i]);
        }
        tape.Accumulate(ia, g);
      },
      op);
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(id_); }

Var Tape::Push(Matrix value, bool requires_grad, BackwardFn backward,
               const char* op) {
  if (value.hasNaN()) {
    throw NumericFault(std::string("NaN produced by ") + op + " at node " +
                       std::to_string(nodes_.size()));
  }
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Constant(Matrix value) {
  return Push(std::move(value), false, nullptr, "constant");
}

Var Tape::Param(Parameter& param) {
  Var v = Push(param.value, true, nullptr, param.name.c_str());
  nodes_.back().param = &param;
  return v;
}

void Tape::Accumulate(int id, const Matrix& g) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (node.grad.size() == 0) {
    node.grad = g;
  } else {
    node.grad += g;
  }
}

void Tape::Backward(Var loss) {
  if (loss.tape() != this) {
    throw InvalidArgument("Backward: loss belongs to a different tape");
  }
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw InvalidArgument("Backward: loss must be scalar, got " +
                          Shape(loss.value()));
  }
  for (Node& node : nodes_) node.grad.resize(0, 0);
  if (!nodes_[loss.id()].requires_grad) return;
  nodes_[loss.id()].grad = Matrix::Ones(1, 1);
  for (int id = loss.id(); id >= 0; --id) {
    Node& node = nodes_[id];
    if (node.grad.size() == 0) continue;
    if (node.backward) node.backward(*this, id);
    if (node.param != nullptr) {
      Parameter& p = *node.param;
      if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) {
        p.ZeroGrad();
      }
      p.grad += nodes_[id].grad;
    }
  }
}

Var MatMul(Var a, Var b) {
  RequireSameTape("MatMul", a, b);
  if (a.cols() != b.rows()) {
    throw DimensionError("MatMul: " + Shape(a.value()) + " * " +
                         Shape(b.value()));
  }
  Tape& t = *a.tape();
  const int ia = a.id(), ib = b.id();
  return t.Push(
      a.value() * b.value(), AnyGrad(t, a, b),
      [ia, ib](Tape& tape, int self) {
        const Matrix& g = tape.grad(self);
        if (tape.requires_grad(ia)) {
          tape.Accumulate(ia, g * tape.value(ib).transpose());
        }
        if (tape.requires_grad(ib)) {
          tape.Accumulate(ib, tape.value(ia).transpose() * g);
        }
      },
      "MatMul");
}

Var Affine(Var x, Var w, Var b) {
  RequireSameTape("Affine", x, w);
  RequireSameTape("Affine", x, b);
  if (x.cols() != w.rows() || b.rows() != 1 || b.cols() != w.cols()) {
    throw DimensionError("Affine: x " + Shape(x.value()) + ", w " +
                         Shape(w.value()) + ", b " + Shape(b.value()));
  }
  Tape& t = *x.tape();
  Matrix out = x.value() * w.value();
  out.rowwise() += b.value().row(0);
  const int ix = x.id(), iw = w.id(), ib = b.id();
  const bool rg = t.requires_grad(ix) || t.requires_grad(iw) ||
                  t.requires_grad(ib);
  return t.Push(
      std::move(out), rg,
      [ix, iw, ib](Tape& tape, int self) {
        const Matrix& g = tape.grad(self);
        if (tape.requires_grad(ix)) {
          tape.Accumulate(ix, g * tape.value(iw).transpose());
        }
        if (tape.requires_grad(iw)) {
          tape.Accumulate(iw, tape.value(ix).transpose() * g);
        }
        if (tape.requires_grad(ib)) {
          tape.Accumulate(ib, g.colwise().sum());
        }
      },
      "Affine");
}

Var Add(Var a, Var b) {
  RequireSameTape("Add", a, b);
  RequireSameShape("Add", a, b);
  Tape& t = *a.tape();
  const int ia = a.id(), ib = b.id();
  return t.Push(
      a.value() + b.value(), AnyGrad(t, a, b),
      [ia, ib](Tape& tape, int self) {
        tape.Accumulate(ia, tape.grad(self));
        tape.Accumulate(ib, tape.grad(self));
      },
      "Add");
}

Var AddRow(Var a, Var row) {
  RequireSameTape("AddRow", a, row);
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw DimensionError("AddRow: " + Shape(a.value()) + " + row " +
                         Shape(row.value()));
  }
  Tape& t = *a.tape();
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  const int ia = a.id(), ir = row.id();
  return t.Push(
      std::move(out), AnyGrad(t, a, row),
      [ia, ir](Tape& tape, int self) {
        tape.Accumulate(ia, tape.grad(self));
        if (tape.requires_grad(ir)) {
          tape.Accumulate(ir, tape.grad(self).colwise().sum());
        }
      },
      "AddRow");
}

Var Sub(Var a, Var b) {
  RequireSameTape("Sub", a, b);
  RequireSameShape("Sub", a, b);
  Tape& t = *a.tape();
  const int ia = a.id(), ib = b.id();
  return t.Push(
      a.value() - b.value(), AnyGrad(t, a, b),
      [ia, ib](Tape& tape, int self) {
        tape.Accumulate(ia, tape.grad(self));
        if (tape.requires_grad(ib)) tape.Accumulate(ib, -tape.grad(self));
      },
      "Sub");
}

Var Mul(Var a, Var b) {
  RequireSameTape("Mul", a, b);
  RequireSameShape("Mul", a, b);
  Tape& t = *a.tape();
  const int ia = a.id(), ib = b.id();
  return t.Push(
      a.value().cwiseProduct(b.value()), AnyGrad(t, a, b),
      [ia, ib](Tape& tape, int self) {
        const Matrix& g = tape.grad(self);
        if (tape.requires_grad(ia)) {
          tape.Accumulate(ia, g.cwiseProduct(tape.value(ib)));
        }
        if (tape.requires_grad(ib)) {
          tape.Accumulate(ib, g.cwiseProduct(tape.value(ia)));
        }
      },
      "Mul");
}

Var MulCol(Var a, Var col) {
  RequireSameTape("MulCol", a, col);
  if (col.cols() != 1 || col.rows() != a.rows()) {
    throw DimensionError("MulCol: " + Shape(a.value()) + " * col " +
                         Shape(col.value()));
  }
  Tape& t = *a.tape();
  Matrix out = a.value().array().colwise() * col.value().col(0).array();
  const int ia = a.id(), ic = col.id();
  return t.Push(
      std::move(out), AnyGrad(t, a, col),
      [ia, ic](Tape& tape, int self) {
        const Matrix& g = tape.grad(self);
        if (tape.requires_grad(ia)) {
          Matrix ga = g.array().colwise() * tape.value(ic).col(0).array();
          tape.Accumulate(ia, ga);
        }
        if (tape.requires_grad(ic)) {
          tape.Accumulate(ic, g.cwiseProduct(tape.value(ia)).rowwise().sum());
        }
      },
      "MulCol");
}

Var Scale(Var a, double c) {
  Tape& t = *a.tape();
  const int ia = a.id();
  return t.Push(
      a.value() * c, AnyGrad(t, a),
      [ia, c](Tape& tape, int self) { tape.Accumulate(ia, tape.grad(self) * c); },
      "Scale");
}

Var AddScalar(Var a, double c) {
  Tape& t = *a.tape();
  const int ia = a.id();
  return t.Push(
      (a.value().array() + c).matrix(), AnyGrad(t, a),
      [ia](Tape& tape, int self) { tape.Accumulate(ia, tape.grad(self)); },
      "AddScalar");
}

Var Relu(Var a) {
  return Unary(
      "Relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var Tanh(Var a) {
  return Unary(
      "Tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Exp(Var a) {
  return Unary(
      "Exp", a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Var Log(Var a) {
  return Unary(
      "Log", a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Var Square(Var a) {
  return Unary(
      "Square", a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Var Softplus(Var a) {
  return Unary("Softplus", a, SoftplusScalar, [](double x, double) {
    return 1.0 / (1.0 + std::exp(-x));
  });
}

Var Clamp(Var a, double lo, double hi) {
  return Unary(
      "Clamp", a, [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
      [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Var Sum(Var a) {
  Tape& t = *a.tape();
  const int ia = a.id();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.Push(
      std::move(out), AnyGrad(t, a),
      [ia](Tape& tape, int self) {
        const Matrix& x = tape.value(ia);
        tape.Accumulate(ia, Matrix::Constant(x.rows(), x.cols(),
                                             tape.grad(self)(0, 0)));
      },
      "Sum");
}

Var Mean(Var a) {
  if (a.value().size() == 0) throw InvalidArgument("Mean: empty operand");
  return Scale(Sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Var RowSum(Var a) {
  Tape& t = *a.tape();
  const int ia = a.id();
  return t.Push(
      a.value().rowwise().sum(), AnyGrad(t, a),
      [ia](Tape& tape, int self) {
        const Matrix& x = tape.value(ia);
        Matrix g = tape.grad(self).col(0).replicate(1, x.cols());
        tape.Accumulate(ia, g);
      },
      "RowSum");
}

Var LogSumExpRows(Var a) {
  Tape& t = *a.tape();
  const Matrix& x = a.value();
  Matrix out(x.rows(), 1);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    out(r, 0) = std::isinf(m) ? m : m + std::log((x.row(r).array() - m).exp().sum());
  }
  const int ia = a.id();
  return t.Push(
      std::move(out), AnyGrad(t, a),
      [ia](Tape& tape, int self) {
        const Matrix& xv = tape.value(ia);
        const Matrix& y = tape.value(self);
        const Matrix& g = tape.grad(self);
        Matrix ga(xv.rows(), xv.cols());
        for (Eigen::Index r = 0; r < xv.rows(); ++r) {
          ga.row(r) = (xv.row(r).array() - y(r, 0)).exp() * g(r, 0);
        }
        tape.Accumulate(ia, ga);
      },
      "LogSumExpRows");
}

Var LogSoftmaxRows(Var a) {
  Tape& t = *a.tape();
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    const double lse = m + std::log((x.row(r).array() - m).exp().sum());
    out.row(r) = x.row(r).array() - lse;
  }
  const int ia = a.id();
  return t.Push(
      std::move(out), AnyGrad(t, a),
      [ia](Tape& tape, int self) {
        const Matrix& y = tape.value(self);
        const Matrix& g = tape.grad(self);
        Matrix ga = g;
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
          const double gs = g.row(r).sum();
          ga.row(r) -= (y.row(r).array().exp() * gs).matrix();
        }
        tape.Accumulate(ia, ga);
      },
      "LogSoftmaxRows");
}

Var SoftmaxRows(Var a) {
  Tape& t = *a.tape();
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    out.row(r) = (x.row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  const int ia = a.id();
  return t.Push(
      std::move(out), AnyGrad(t, a),
      [ia](Tape& tape, int self) {
        const Matrix& y = tape.value(self);
        const Matrix& g = tape.grad(self);
        Matrix ga(y.rows(), y.cols());
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
          const double dot = g.row(r).dot(y.row(r));
          ga.row(r) = y.row(r).array() * (g.row(r).array() - dot);
        }
        tape.Accumulate(ia, ga);
      },
      "SoftmaxRows");
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw InvalidArgument("ConcatCols: no operands");
  Tape& t = *parts.front().tape();
  const int rows = parts.front().rows();
  int cols = 0;
  bool rg = false;
  std::vector<int> ids;
  std::vector<int> widths;
  for (const Var& p : parts) {
    if (p.tape() != &t) throw InvalidArgument("ConcatCols: mixed tapes");
    if (p.rows() != rows) {
      throw DimensionError("ConcatCols: row mismatch " + Shape(p.value()));
    }
    cols += p.cols();
    rg = rg || t.requires_grad(p.id());
    ids.push_back(p.id());
    widths.push_back(p.cols());
  }
  Matrix out(rows, cols);
  int offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return t.Push(
      std::move(out), rg,
      [ids, widths](Tape& tape, int self) {
        const Matrix& g = tape.grad(self);
        int off = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (tape.requires_grad(ids[i])) {
            tape.Accumulate(ids[i], g.middleCols(off, widths[i]));
          }
          off += widths[i];
        }
      },
      "ConcatCols");
}

Var SliceCols(Var a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw DimensionError("SliceCols: [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") out of " +
                         Shape(a.value()));
  }
  Tape& t = *a.tape();
  const int ia = a.id();
  return t.Push(
      a.value().middleCols(start, count), AnyGrad(t, a),
      [ia, start, count](Tape& tape, int self) {
        const Matrix& x = tape.value(ia);
        Matrix g = Matrix::Zero(x.rows(), x.cols());
        g.middleCols(start, count) = tape.grad(self);
        tape.Accumulate(ia, g);
      },
      "SliceCols");
}

}  // namespace skillmpc
