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

#include "skillmpc/mlp.h"

#include <cmath>
#include <utility>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

void CheckSizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) {
    throw InvalidArgument("Mlp needs at least an input and an output size");
  }
  for (int s : sizes) {
    if (s < 0) throw InvalidArgument("Mlp layer sizes must be non-negative");
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw InvalidArgument("Mlp layer sizes must be positive");
  }
}

}  // namespace

Mlp Mlp::Zeros(std::vector<int> layer_sizes, const std::string& name) {
  CheckSizes(layer_sizes);
  Mlp net;
  net.layer_sizes_ = std::move(layer_sizes);
  for (std::size_t l = 0; l + 1 < net.layer_sizes_.size(); ++l) {
    const int in = net.layer_sizes_[l], out = net.layer_sizes_[l + 1];
    const std::string tag = name + "/" + std::to_string(l);
    net.weights_.push_back({tag + "/w", Matrix::Zero(in, out), Matrix()});
    net.biases_.push_back({tag + "/b", Matrix::Zero(1, out), Matrix()});
  }
  return net;
}

Mlp::Mlp(std::vector<int> layer_sizes, RngStream& rng, const std::string& name)
    : Mlp(Zeros(std::move(layer_sizes), name)) {
  for (Parameter& w : weights_) {
    const double bound = w.value.rows() > 0 ? 1.0 / std::sqrt(w.value.rows()) : 0.0;
    for (Eigen::Index j = 0; j < w.value.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.value.rows(); ++i) {
        w.value(i, j) = rng.Uniform(-bound, bound);
      }
    }
  }
}

int Mlp::parameter_count() const {
  int count = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    count += (layer_sizes_[l] + 1) * layer_sizes_[l + 1];
  }
  return count;
}

void Mlp::CheckInput(Eigen::Index cols) const {
  if (layer_sizes_.empty()) throw UninitializedModel("Mlp has no layers");
  if (cols != input_size()) {
    throw DimensionError("Mlp input has " + std::to_string(cols) +
                         " features, expected " +
                         std::to_string(input_size()));
  }
}

Vector Mlp::Forward(const Vector& input) const {
  CheckInput(input.size());
  Matrix x = input.transpose();
  return Forward(x).row(0).transpose();
}

Matrix Mlp::Forward(const Matrix& input) const {
  CheckInput(input.cols());
  Matrix pre = input * weights_[0].value;
  pre.rowwise() += biases_[0].value.row(0);
  return ForwardFromPreActivation(std::move(pre), 1);
}

Matrix Mlp::ForwardFromPreActivation(Matrix pre, int first_layer) const {
  for (int l = first_layer; l < num_layers(); ++l) {
    pre = pre.cwiseMax(0.0) * weights_[l].value;
    pre.rowwise() += biases_[l].value.row(0);
  }
  return pre;
}

Var Mlp::Forward(Tape& tape, Var input) {
  CheckInput(input.cols());
  Var h = input;
  for (int l = 0; l < num_layers(); ++l) {
    h = Affine(h, tape.Param(weights_[l]), tape.Param(biases_[l]));
    if (l + 1 < num_layers()) h = Relu(h);
  }
  return h;
}

Var Mlp::ForwardFrozen(Tape& tape, Var input) const {
  CheckInput(input.cols());
  Var h = input;
  for (int l = 0; l < num_layers(); ++l) {
    h = Affine(h, tape.Constant(weights_[l].value),
               tape.Constant(biases_[l].value));
    if (l + 1 < num_layers()) h = Relu(h);
  }
  return h;
}

std::vector<Parameter*> Mlp::Parameters() {
  std::vector<Parameter*> out;
  for (int l = 0; l < num_layers(); ++l) {
    out.push_back(&weights_[l]);
    out.push_back(&biases_[l]);
  }
  return out;
}

std::vector<const Parameter*> Mlp::Parameters() const {
  std::vector<const Parameter*> out;
  for (int l = 0; l < num_layers(); ++l) {
    out.push_back(&weights_[l]);
    out.push_back(&biases_[l]);
  }
  return out;
}

void Mlp::ZeroGrad() {
  for (Parameter* p : Parameters()) p->ZeroGrad();
}

void Mlp::SoftUpdateFrom(const Mlp& source, double tau) {
  if (source.layer_sizes_ != layer_sizes_) {
    throw DimensionError("SoftUpdateFrom: architectures differ");
  }
  for (int l = 0; l < num_layers(); ++l) {
    weights_[l].value = (1.0 - tau) * weights_[l].value + tau * source.weights_[l].value;
    biases_[l].value = (1.0 - tau) * biases_[l].value + tau * source.biases_[l].value;
  }
}

}  // namespace skillmpc
