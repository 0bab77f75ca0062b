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

#include "skillmpc/skill_dynamics.h"

#include <cmath>
#include <numbers>
#include <string>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

Matrix GatherCols(const Matrix& m, const std::vector<int>& idx) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(i) = m.col(idx[i]);
  return out;
}

Matrix AsRow(const Vector& v) { return v.transpose(); }

}  // namespace

// ---------------------------------------------------------------------------
// Normalizer

Normalizer::Normalizer(int dim, double min_std)
    : min_std_(min_std), mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {}

void Normalizer::Reset() {
  count_ = 0;
  mean_.setZero();
  m2_.setZero();
  explicit_std_.resize(0);
  frozen_ = false;
}

void Normalizer::Accumulate(const Matrix& rows) {
  if (frozen_) throw InvalidArgument("Normalizer is frozen");
  if (rows.cols() != dim()) {
    throw DimensionError("Normalizer: expected " + std::to_string(dim()) +
                         " columns, got " + std::to_string(rows.cols()));
  }
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    ++count_;
    const Vector x = rows.row(r).transpose();
    const Vector delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(x - mean_);
  }
}

void Normalizer::SetStatistics(const Vector& mean, const Vector& stddev) {
  if (mean.size() != dim() || stddev.size() != dim()) {
    throw DimensionError("Normalizer::SetStatistics: size mismatch");
  }
  if ((stddev.array() <= 0.0).any()) {
    throw InvalidArgument("Normalizer::SetStatistics: stddev must be positive");
  }
  count_ = 1;
  mean_ = mean;
  m2_.setZero();
  explicit_std_ = stddev;
  frozen_ = true;
}

Vector Normalizer::stddev() const {
  if (explicit_std_.size() == dim() && dim() > 0) return explicit_std_;
  if (count_ == 0) return Vector::Ones(dim());
  return (m2_ / static_cast<double>(count_)).cwiseSqrt().cwiseMax(min_std_);
}

double Normalizer::LogScaleSum() const {
  return stddev().array().log().sum();
}

Matrix Normalizer::Normalize(const Matrix& rows) const {
  const Vector sd = stddev();
  Matrix out = rows.rowwise() - mean_.transpose();
  return out.array().rowwise() / sd.transpose().array();
}

Matrix Normalizer::Denormalize(const Matrix& rows) const {
  const Vector sd = stddev();
  Matrix out = rows.array().rowwise() * sd.transpose().array();
  return out.rowwise() + mean_.transpose();
}

void Normalizer::Restore(long count, const Vector& mean, const Vector& m2,
                         const Vector& explicit_std, bool frozen) {
  if (mean.size() != dim() || m2.size() != dim()) {
    throw DimensionError("Normalizer::Restore: size mismatch");
  }
  count_ = count;
  mean_ = mean;
  m2_ = m2;
  explicit_std_ = explicit_std;
  frozen_ = frozen;
}

// ---------------------------------------------------------------------------
// Batches

DynamicsBatch DynamicsBatch::FromTransitions(
    std::span<const Transition> transitions) {
  if (transitions.empty()) throw InvalidArgument("empty transition batch");
  const int n = static_cast<int>(transitions.size());
  DynamicsBatch b;
  b.states.resize(n, transitions[0].state.size());
  b.conditioning.resize(n, transitions[0].skill.size());
  b.next_states.resize(n, transitions[0].next_state.size());
  for (int i = 0; i < n; ++i) {
    b.states.row(i) = transitions[i].state.transpose();
    b.conditioning.row(i) = transitions[i].skill.transpose();
    b.next_states.row(i) = transitions[i].next_state.transpose();
  }
  return b;
}

DynamicsBatch DynamicsBatch::FromTransitionsWithActions(
    std::span<const Transition> transitions) {
  DynamicsBatch b = FromTransitions(transitions);
  b.conditioning.resize(b.size(), transitions[0].action.size());
  for (int i = 0; i < b.size(); ++i) {
    b.conditioning.row(i) = transitions[i].action.transpose();
  }
  return b;
}

DynamicsBatch DynamicsBatch::Rows(std::span<const int> rows) const {
  DynamicsBatch b;
  const auto n = static_cast<Eigen::Index>(rows.size());
  b.states.resize(n, states.cols());
  b.conditioning.resize(n, conditioning.cols());
  b.next_states.resize(n, next_states.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    b.states.row(i) = states.row(rows[i]);
    b.conditioning.row(i) = conditioning.row(rows[i]);
    b.next_states.row(i) = next_states.row(rows[i]);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Model

SkillDynamicsConfig SkillDynamicsConfig::ForEnvironment(
    const EnvSpec& env, int conditioning_dim, std::vector<int> hidden_sizes,
    int expert_count) {
  SkillDynamicsConfig c;
  c.state_dim = env.state_dim;
  c.conditioning_dim = conditioning_dim;
  c.input_indices = env.dynamics_observation_indices;
  c.predicted_indices = env.PredictedIndices();
  c.hidden_sizes = std::move(hidden_sizes);
  c.expert_count = expert_count;
  return c;
}

SkillDynamicsModel::SkillDynamicsModel(SkillDynamicsConfig config,
                                       RngStream& rng)
    : config_(std::move(config)) {
  if (config_.expert_count < 1) throw InvalidArgument("expert_count must be >= 1");
  if (config_.predicted_indices.empty()) {
    throw InvalidArgument("dynamics model must predict at least one coordinate");
  }
  for (int i : config_.input_indices) {
    if (i < 0 || i >= config_.state_dim) throw DimensionError("input index out of range");
  }
  for (int i : config_.predicted_indices) {
    if (i < 0 || i >= config_.state_dim) throw DimensionError("predicted index out of range");
  }
  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(config_.input_indices.size()) +
                  config_.conditioning_dim);
  for (int h : config_.hidden_sizes) sizes.push_back(h);
  sizes.push_back(config_.expert_count * predicted_dim() + config_.expert_count);
  network_ = Mlp(sizes, rng, "dynamics");
  input_normalizer_ =
      Normalizer(static_cast<int>(config_.input_indices.size()), config_.min_std);
  target_normalizer_ = Normalizer(predicted_dim(), config_.min_std);
}

bool SkillDynamicsModel::ready() const {
  return input_normalizer_.initialized() && target_normalizer_.initialized();
}

void SkillDynamicsModel::RequireReady(const char* where) const {
  if (!ready()) {
    throw UninitializedModel(std::string(where) +
                             ": normalizers have not seen any data");
  }
}

void SkillDynamicsModel::UpdateNormalizers(const DynamicsBatch& batch) {
  if (batch.size() == 0) throw InvalidArgument("UpdateNormalizers: empty batch");
  input_normalizer_.Reset();
  target_normalizer_.Reset();
  input_normalizer_.Accumulate(GatherCols(batch.states, config_.input_indices));
  target_normalizer_.Accumulate(
      GatherCols(batch.next_states, config_.predicted_indices) -
      GatherCols(batch.states, config_.predicted_indices));
  input_normalizer_.Freeze();
  target_normalizer_.Freeze();
}

Matrix SkillDynamicsModel::NetworkInput(const Matrix& states,
                                        const Matrix& z) const {
  if (states.cols() != config_.state_dim || z.cols() != config_.conditioning_dim ||
      states.rows() != z.rows()) {
    throw DimensionError("dynamics model: bad state/skill batch shape");
  }
  const int in = static_cast<int>(config_.input_indices.size());
  Matrix x(states.rows(), in + config_.conditioning_dim);
  x.leftCols(in) = input_normalizer_.Normalize(GatherCols(states, config_.input_indices));
  x.rightCols(config_.conditioning_dim) = z;
  return x;
}

Matrix SkillDynamicsModel::NormalizedTargets(const Matrix& states,
                                             const Matrix& next_states) const {
  if (next_states.cols() != config_.state_dim || next_states.rows() != states.rows()) {
    throw DimensionError("dynamics model: bad next-state batch shape");
  }
  return target_normalizer_.Normalize(
      GatherCols(next_states, config_.predicted_indices) -
      GatherCols(states, config_.predicted_indices));
}

Vector SkillDynamicsModel::MixtureLogDensity(const Matrix& outputs,
                                             const Matrix& targets) const {
  const int p = predicted_dim();
  const int e_count = config_.expert_count;
  const bool shared_target = targets.rows() == 1;
  Vector out(outputs.rows());
  Eigen::VectorXd comp(e_count);
  for (Eigen::Index r = 0; r < outputs.rows(); ++r) {
    const auto y = targets.row(shared_target ? 0 : r);
    const auto logits = outputs.row(r).segment(e_count * p, e_count);
    const double lmax = logits.maxCoeff();
    const double log_norm = lmax + std::log((logits.array() - lmax).exp().sum());
    for (int e = 0; e < e_count; ++e) {
      const double sq = (outputs.row(r).segment(e * p, p) - y).squaredNorm();
      comp[e] = logits[e] - log_norm - 0.5 * sq - p * kHalfLog2Pi;
    }
    const double cmax = comp.maxCoeff();
    out[r] = cmax + std::log((comp.array() - cmax).exp().sum());
  }
  return out;
}

double SkillDynamicsModel::LogProb(const Vector& state, const Vector& z,
                                   const Vector& next_state) const {
  RequireReady("LogProb");
  const Matrix s = AsRow(state), zz = AsRow(z), sn = AsRow(next_state);
  const Matrix outputs = network_.Forward(NetworkInput(s, zz));
  const double lp = MixtureLogDensity(outputs, NormalizedTargets(s, sn))[0] -
                    target_normalizer_.LogScaleSum();
  if (!std::isfinite(lp)) throw NumericFault("LogProb: non-finite density");
  return lp;
}

Vector SkillDynamicsModel::LogProbBatch(const DynamicsBatch& batch) const {
  RequireReady("LogProbBatch");
  const Matrix outputs = network_.Forward(NetworkInput(batch.states, batch.conditioning));
  Vector lp = MixtureLogDensity(outputs, NormalizedTargets(batch.states, batch.next_states));
  lp.array() -= target_normalizer_.LogScaleSum();
  if (!lp.allFinite()) throw NumericFault("LogProbBatch: non-finite density");
  return lp;
}

Matrix SkillDynamicsModel::LogProbCross(const Matrix& states,
                                        const Matrix& next_states,
                                        const Matrix& skills) const {
  RequireReady("LogProbCross");
  if (skills.cols() != config_.conditioning_dim) {
    throw DimensionError("LogProbCross: skill width mismatch");
  }
  const int in = static_cast<int>(config_.input_indices.size());
  const Matrix& w0 = network_.weight(0).value;
  const Matrix skill_part = skills * w0.bottomRows(config_.conditioning_dim);
  const Matrix inputs =
      input_normalizer_.Normalize(GatherCols(states, config_.input_indices));
  const Matrix targets = NormalizedTargets(states, next_states);
  const double log_jac = target_normalizer_.LogScaleSum();

  Matrix out(states.rows(), skills.rows());
  for (Eigen::Index b = 0; b < states.rows(); ++b) {
    RowVector state_part = network_.bias(0).value.row(0);
    if (in > 0) state_part += inputs.row(b) * w0.topRows(in);
    Matrix pre = skill_part.rowwise() + state_part;
    const Matrix outputs = network_.ForwardFromPreActivation(std::move(pre), 1);
    out.row(b) = MixtureLogDensity(outputs, targets.row(b)).transpose();
  }
  out.array() -= log_jac;
  if (!out.allFinite()) throw NumericFault("LogProbCross: non-finite density");
  return out;
}

double SkillDynamicsModel::MeanNegLogLikelihood(const DynamicsBatch& batch) const {
  if (batch.size() == 0) throw InvalidArgument("MeanNegLogLikelihood: empty batch");
  return -LogProbBatch(batch).mean();
}

double SkillDynamicsModel::FitStep(const DynamicsBatch& batch, Adam& adam) {
  if (batch.size() == 0) throw InvalidArgument("FitStep: empty batch");
  RequireReady("FitStep");
  const int p = predicted_dim();
  const int e_count = config_.expert_count;

  Tape tape;
  Var x = tape.Constant(NetworkInput(batch.states, batch.conditioning));
  Var y = tape.Constant(NormalizedTargets(batch.states, batch.next_states));
  network_.ZeroGrad();
  Var out = network_.Forward(tape, x);
  Var log_w = LogSoftmaxRows(SliceCols(out, e_count * p, e_count));
  std::vector<Var> comps;
  for (int e = 0; e < e_count; ++e) {
    Var sq = RowSum(Square(Sub(SliceCols(out, e * p, p), y)));
    comps.push_back(AddScalar(Scale(sq, -0.5), -p * kHalfLog2Pi));
  }
  Var ll = LogSumExpRows(Add(ConcatCols(comps), log_w));
  Var loss = Scale(Mean(ll), -1.0);
  const double pre_step =
      loss.value()(0, 0) + target_normalizer_.LogScaleSum();
  if (!std::isfinite(pre_step)) throw NumericFault("FitStep: non-finite loss");
  tape.Backward(loss);
  auto params = network_.Parameters();
  adam.Step(params);
  return pre_step;
}

Matrix SkillDynamicsModel::GatingWeights(const Matrix& states,
                                         const Matrix& z) const {
  RequireReady("GatingWeights");
  const int p = predicted_dim();
  const int e_count = config_.expert_count;
  const Matrix outputs = network_.Forward(NetworkInput(states, z));
  Matrix w = outputs.middleCols(e_count * p, e_count);
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    w.row(r).array() -= w.row(r).maxCoeff();
    w.row(r) = w.row(r).array().exp();
    w.row(r) /= w.row(r).sum();
  }
  return w;
}

Matrix SkillDynamicsModel::PredictNextBatch(const Matrix& states,
                                            const Matrix& z) const {
  RequireReady("PredictNext");
  const int p = predicted_dim();
  const int e_count = config_.expert_count;
  const Matrix outputs = network_.Forward(NetworkInput(states, z));
  Matrix mean_delta = Matrix::Zero(states.rows(), p);
  for (Eigen::Index r = 0; r < outputs.rows(); ++r) {
    const auto logits = outputs.row(r).segment(e_count * p, e_count);
    Eigen::RowVectorXd w = (logits.array() - logits.maxCoeff()).exp();
    w /= w.sum();
    for (int e = 0; e < e_count; ++e) {
      mean_delta.row(r) += w[e] * outputs.row(r).segment(e * p, p);
    }
  }
  const Matrix delta = target_normalizer_.Denormalize(mean_delta);
  Matrix next = states;
  for (int i = 0; i < p; ++i) {
    next.col(config_.predicted_indices[i]) += delta.col(i);
  }
  if (!next.allFinite()) throw NumericFault("PredictNext: non-finite prediction");
  return next;
}

Vector SkillDynamicsModel::PredictNext(const Vector& state, const Vector& z,
                                       RngStream* sample_rng) const {
  if (sample_rng == nullptr) {
    return PredictNextBatch(AsRow(state), AsRow(z)).row(0).transpose();
  }
  RequireReady("PredictNext");
  const int p = predicted_dim();
  const int e_count = config_.expert_count;
  const Matrix outputs = network_.Forward(NetworkInput(AsRow(state), AsRow(z)));
  const auto logits = outputs.row(0).segment(e_count * p, e_count);
  Eigen::RowVectorXd w = (logits.array() - logits.maxCoeff()).exp();
  w /= w.sum();
  double u = sample_rng->Uniform();
  int expert = e_count - 1;
  for (int e = 0; e < e_count; ++e) {
    if (u < w[e]) {
      expert = e;
      break;
    }
    u -= w[e];
  }
  Matrix y = outputs.row(0).segment(expert * p, p);
  for (int i = 0; i < p; ++i) y(0, i) += sample_rng->Normal();
  const Matrix delta = target_normalizer_.Denormalize(y);
  Vector next = state;
  for (int i = 0; i < p; ++i) next[config_.predicted_indices[i]] += delta(0, i);
  return next;
}

}  // namespace skillmpc
