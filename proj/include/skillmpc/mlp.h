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

#ifndef SKILLMPC_MLP_H_
#define SKILLMPC_MLP_H_

#include <string>
#include <vector>

#include "skillmpc/autodiff.h"
#include "skillmpc/rng.h"

namespace skillmpc {

// Fully connected network: ReLU on hidden layers, linear output.
//
// Weights are stored as (fan_in x fan_out) so a batch X (rows = samples) maps
// to X * W + b. Initialization draws weights from U(-1/sqrt(fan_in),
// 1/sqrt(fan_in)) and sets biases to zero.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, RngStream& rng,
      const std::string& name = "mlp");

  // All parameters zero.
  static Mlp Zeros(std::vector<int> layer_sizes,
                   const std::string& name = "mlp");

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  // Sum over layers of (fan_in + 1) * fan_out.
  int parameter_count() const;

  Vector Forward(const Vector& input) const;
  // Batched forward; rows are samples.
  Matrix Forward(const Matrix& input) const;

  // Records the forward pass on a tape with trainable parameters.
  Var Forward(Tape& tape, Var input);
  // Same, with the parameters entered as constants (gradients still flow to
  // the input).
  Var ForwardFrozen(Tape& tape, Var input) const;

  Parameter& weight(int layer) { return weights_[layer]; }
  Parameter& bias(int layer) { return biases_[layer]; }
  const Parameter& weight(int layer) const { return weights_[layer]; }
  const Parameter& bias(int layer) const { return biases_[layer]; }

  // Applies layers [first_layer, end) to an input that is already the
  // pre-activation output of layer first_layer - 1.
  Matrix ForwardFromPreActivation(Matrix pre, int first_layer) const;

  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;

  void ZeroGrad();
  // this <- (1 - tau) * this + tau * source. Shapes must match.
  void SoftUpdateFrom(const Mlp& source, double tau);

 private:
  void CheckInput(Eigen::Index cols) const;

  std::vector<int> layer_sizes_;
  std::vector<Parameter> weights_;
  std::vector<Parameter> biases_;
};

}  // namespace skillmpc

#endif  // SKILLMPC_MLP_H_
