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

#include "skillmpc/agent.h"

#include <cmath>
#include <numbers>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
const double kLog2 = std::log(2.0);

double SoftplusScalar(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log(1 - tanh(u)^2), stable for large |u|.
double LogTanhJacobian(double u) {
  return 2.0 * (kLog2 - u - SoftplusScalar(-2.0 * u));
}

std::vector<int> Sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

Matrix ConcatColsPlain(std::initializer_list<const Matrix*> parts) {
  Eigen::Index rows = (*parts.begin())->rows(), cols = 0;
  for (const Matrix* p : parts) {
    if (p->rows() != rows) throw DimensionError("batch row mismatch");
    cols += p->cols();
  }
  Matrix out(rows, cols);
  Eigen::Index off = 0;
  for (const Matrix* p : parts) {
    out.middleCols(off, p->cols()) = *p;
    off += p->cols();
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Policy

SkillConditionedPolicy::SkillConditionedPolicy(int observation_dim,
                                               int skill_dim, int action_dim,
                                               const AgentConfig& config,
                                               RngStream& rng)
    : observation_dim_(observation_dim),
      skill_dim_(skill_dim),
      action_dim_(action_dim),
      log_std_min_(config.log_std_min),
      log_std_max_(config.log_std_max),
      network_(Sizes(observation_dim + skill_dim, config.hidden_sizes,
                     2 * action_dim),
               rng, "policy") {
  if (action_dim <= 0) throw InvalidArgument("action_dim must be positive");
}

Matrix SkillConditionedPolicy::Input(const Matrix& observations,
                                     const Matrix& skills) const {
  if (observations.cols() != observation_dim_ || skills.cols() != skill_dim_) {
    throw DimensionError("policy input: observation/skill width mismatch");
  }
  return ConcatColsPlain({&observations, &skills});
}

void SkillConditionedPolicy::Distribution(const Matrix& observations,
                                          const Matrix& skills, Matrix* mean,
                                          Matrix* log_std) const {
  const Matrix out = network_.Forward(Input(observations, skills));
  if (!out.allFinite()) throw NumericFault("policy network produced non-finite output");
  *mean = out.leftCols(action_dim_);
  *log_std = out.rightCols(action_dim_).cwiseMax(log_std_min_).cwiseMin(log_std_max_);
}

std::pair<Matrix, Vector> SkillConditionedPolicy::SampleBatch(
    const Matrix& observations, const Matrix& skills, const Matrix& noise) const {
  Matrix mean, log_std;
  Distribution(observations, skills, &mean, &log_std);
  if (noise.rows() != mean.rows() || noise.cols() != mean.cols()) {
    throw DimensionError("policy noise shape mismatch");
  }
  const Matrix pre = mean.array() + log_std.array().exp() * noise.array();
  // tanh rounds to exactly +-1 once |pre| exceeds about 19; keep emitted
  // actions strictly inside the open box.
  const double edge = std::nextafter(1.0, 0.0);
  Matrix actions = pre.array().tanh().cwiseMax(-edge).cwiseMin(edge);
  Vector logp(mean.rows());
  for (Eigen::Index r = 0; r < mean.rows(); ++r) {
    double lp = 0.0;
    for (int j = 0; j < action_dim_; ++j) {
      lp += -0.5 * noise(r, j) * noise(r, j) - log_std(r, j) - kHalfLog2Pi -
            LogTanhJacobian(pre(r, j));
    }
    logp[r] = lp;
  }
  return {std::move(actions), std::move(logp)};
}

SkillConditionedPolicy::Action SkillConditionedPolicy::Act(
    const Vector& observation, const Vector& skill, RngStream& rng,
    bool deterministic) const {
  Matrix noise = Matrix::Zero(1, action_dim_);
  if (!deterministic) {
    for (int j = 0; j < action_dim_; ++j) noise(0, j) = rng.Normal();
  }
  auto [actions, logp] =
      SampleBatch(observation.transpose(), skill.transpose(), noise);
  return {actions.row(0).transpose(), logp[0]};
}

double SkillConditionedPolicy::LogDensity(const Vector& observation,
                                          const Vector& skill,
                                          const Vector& action) const {
  if (action.size() != action_dim_) throw DimensionError("action width mismatch");
  if ((action.array().abs() >= 1.0).any()) {
    throw InvalidArgument("squashed action must lie strictly inside (-1, 1)");
  }
  Matrix mean, log_std;
  Distribution(observation.transpose(), skill.transpose(), &mean, &log_std);
  double lp = 0.0;
  for (int j = 0; j < action_dim_; ++j) {
    const double u = std::atanh(action[j]);
    const double eps = (u - mean(0, j)) / std::exp(log_std(0, j));
    lp += -0.5 * eps * eps - log_std(0, j) - kHalfLog2Pi - LogTanhJacobian(u);
  }
  return lp;
}

std::pair<Var, Var> SkillConditionedPolicy::SampleOnTape(Tape& tape, Var input,
                                                         const Matrix& noise,
                                                         bool trainable) {
  Var out = trainable ? network_.Forward(tape, input)
                      : network_.ForwardFrozen(tape, input);
  Var mean = SliceCols(out, 0, action_dim_);
  Var log_std = Clamp(SliceCols(out, action_dim_, action_dim_), log_std_min_,
                      log_std_max_);
  Var eps = tape.Constant(noise);
  Var pre = Add(mean, Mul(Exp(log_std), eps));
  Var action = Tanh(pre);
  // log N(eps) - sum log_std - sum log(1 - tanh^2(pre))
  Matrix gauss = (-0.5 * noise.array().square() - kHalfLog2Pi).rowwise().sum();
  Var jac = Scale(Sub(AddScalar(Scale(pre, -1.0), kLog2),
                      Softplus(Scale(pre, -2.0))),
                  2.0);
  Var logp = Sub(Sub(tape.Constant(gauss), RowSum(log_std)), RowSum(jac));
  return {action, logp};
}

// ---------------------------------------------------------------------------
// Critic

Critic::Critic(int observation_dim, int skill_dim, int action_dim,
               const AgentConfig& config, RngStream& rng)
    : online_(Sizes(observation_dim + action_dim + skill_dim,
                    config.hidden_sizes, 1),
              rng, "critic"),
      target_(online_) {}

Matrix Critic::Input(const Matrix& observations, const Matrix& actions,
                     const Matrix& skills) {
  return ConcatColsPlain({&observations, &actions, &skills});
}

// ---------------------------------------------------------------------------
// Agent

Agent::Agent(int observation_dim, int skill_dim, int action_dim,
             AgentConfig config, RngStream& rng)
    : config_(std::move(config)),
      policy_(observation_dim, skill_dim, action_dim, config_, rng),
      critic_(observation_dim, skill_dim, action_dim, config_, rng),
      policy_adam_(AdamOptions{config_.learning_rate}),
      critic_adam_(AdamOptions{config_.learning_rate}) {}

PolicyObjective Agent::EvaluatePolicyObjective(const AgentBatch& batch,
                                               const Matrix& noise,
                                               double entropy_coeff) const {
  auto [actions, logp] = policy_.SampleBatch(batch.observations, batch.skills, noise);
  const Matrix q =
      critic_.online().Forward(Critic::Input(batch.observations, actions, batch.skills));
  PolicyObjective out;
  out.mean_log_density = logp.mean();
  out.mean_q = q.mean();
  out.loss = entropy_coeff * out.mean_log_density - out.mean_q;
  return out;
}

UpdateReport Agent::Update(const AgentBatch& batch, RngStream& rng) {
  const int n = batch.size();
  if (n == 0) throw InvalidArgument("agent update: empty batch");
  if (batch.rewards.size() != n || batch.skills.rows() != n ||
      batch.actions.rows() != n || batch.next_observations.rows() != n) {
    throw DimensionError("agent update: batch fields disagree on size");
  }
  const int a_dim = policy_.action_dim();
  const double beta = config_.entropy_coeff;
  UpdateReport report;

  auto draw_noise = [&]() {
    Matrix noise(n, a_dim);
    for (int r = 0; r < n; ++r) {
      for (int j = 0; j < a_dim; ++j) noise(r, j) = rng.Normal();
    }
    return noise;
  };

  // Critic.
  {
    const Matrix noise = draw_noise();
    auto [next_actions, next_logp] =
        policy_.SampleBatch(batch.next_observations, batch.skills, noise);
    const Matrix q_next = critic_.target().Forward(
        Critic::Input(batch.next_observations, next_actions, batch.skills));
    Matrix target(n, 1);
    for (int r = 0; r < n; ++r) {
      target(r, 0) = batch.rewards[r] +
                     config_.discount * (q_next(r, 0) - beta * next_logp[r]);
    }
    Tape tape;
    critic_.online().ZeroGrad();
    Var q = critic_.online().Forward(
        tape, tape.Constant(Critic::Input(batch.observations, batch.actions,
                                          batch.skills)));
    Var loss = Mean(Square(Sub(q, tape.Constant(target))));
    report.critic_loss = loss.value()(0, 0);
    tape.Backward(loss);
    auto params = critic_.online().Parameters();
    critic_adam_.Step(params);
  }

  // Policy.
  {
    const Matrix noise = draw_noise();
    Tape tape;
    policy_.network().ZeroGrad();
    Var input = tape.Constant(policy_.Input(batch.observations, batch.skills));
    auto [actions, logp] = policy_.SampleOnTape(tape, input, noise, true);
    Var q = critic_.online().ForwardFrozen(
        tape, ConcatCols({tape.Constant(batch.observations), actions,
                          tape.Constant(batch.skills)}));
    Var mean_logp = Mean(logp);
    Var mean_q = Mean(q);
    Var loss = Sub(Scale(mean_logp, beta), mean_q);
    report.policy_loss = loss.value()(0, 0);
    report.mean_log_density = mean_logp.value()(0, 0);
    report.mean_q = mean_q.value()(0, 0);
    tape.Backward(loss);
    auto params = policy_.network().Parameters();
    policy_adam_.Step(params);
  }

  critic_.SoftUpdate(config_.tau);
  return report;
}

// ---------------------------------------------------------------------------
// Controllers

Vector RandomActionController::Act(const Vector&, const Vector&,
                                   RngStream& rng) const {
  Vector a(action_dim_);
  for (int j = 0; j < action_dim_; ++j) a[j] = rng.Uniform(-1.0, 1.0);
  return a;
}

Vector ActionPassThrough::Act(const Vector&, const Vector& skill,
                              RngStream&) const {
  return skill.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace skillmpc
