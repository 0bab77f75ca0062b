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

#ifndef SKILLMPC_AGENT_H_
#define SKILLMPC_AGENT_H_

#include <vector>

#include "skillmpc/adam.h"
#include "skillmpc/autodiff.h"
#include "skillmpc/mlp.h"
#include "skillmpc/rng.h"

namespace skillmpc {

struct AgentConfig {
  std::vector<int> hidden_sizes{64, 64};
  // Fixed entropy coefficient (beta).
  double entropy_coeff = 0.1;
  double discount = 0.99;
  // Soft target update coefficient.
  double tau = 0.005;
  int updates_per_iter = 128;
  int batch_size = 128;
  double learning_rate = kDefaultLearningRate;
  double log_std_min = -5.0;
  double log_std_max = 2.0;
};

// pi(a | s, z): diagonal Gaussian in pre-squash space followed by tanh, so
// actions always lie in (-1, 1)^action_dim.
class SkillConditionedPolicy {
 public:
  SkillConditionedPolicy() = default;
  SkillConditionedPolicy(int observation_dim, int skill_dim, int action_dim,
                         const AgentConfig& config, RngStream& rng);

  int observation_dim() const { return observation_dim_; }
  int skill_dim() const { return skill_dim_; }
  int action_dim() const { return action_dim_; }

  struct Action {
    Vector action;
    // Log density of the squashed action (tanh correction included).
    double log_density = 0.0;
  };
  // Stochastic: samples the pre-tanh Gaussian then squashes.
  // Deterministic: tanh(mean).
  Action Act(const Vector& observation, const Vector& skill, RngStream& rng,
             bool deterministic) const;

  // Log density of a given squashed action in (-1, 1)^A.
  double LogDensity(const Vector& observation, const Vector& skill,
                    const Vector& action) const;

  // Pre-squash mean and clamped log-std for a batch.
  void Distribution(const Matrix& observations, const Matrix& skills,
                    Matrix* mean, Matrix* log_std) const;

  // Reparameterized squashed sample on a tape: a = tanh(mean + std * noise).
  // Returns (actions B x A, log densities B x 1).
  std::pair<Var, Var> SampleOnTape(Tape& tape, Var input, const Matrix& noise,
                                   bool trainable);
  // Same computation without a tape.
  std::pair<Matrix, Vector> SampleBatch(const Matrix& observations,
                                        const Matrix& skills,
                                        const Matrix& noise) const;

  Matrix Input(const Matrix& observations, const Matrix& skills) const;

  Mlp& network() { return network_; }
  const Mlp& network() const { return network_; }

 private:
  int observation_dim_ = 0;
  int skill_dim_ = 0;
  int action_dim_ = 0;
  double log_std_min_ = -5.0;
  double log_std_max_ = 2.0;
  Mlp network_;
};

// Q(s, a, z) with a soft-updated target copy.
class Critic {
 public:
  Critic() = default;
  Critic(int observation_dim, int skill_dim, int action_dim,
         const AgentConfig& config, RngStream& rng);

  Mlp& online() { return online_; }
  Mlp& target() { return target_; }
  const Mlp& online() const { return online_; }
  const Mlp& target() const { return target_; }

  static Matrix Input(const Matrix& observations, const Matrix& actions,
                      const Matrix& skills);
  // target <- (1 - tau) target + tau online.
  void SoftUpdate(double tau) { target_.SoftUpdateFrom(online_, tau); }

 private:
  Mlp online_;
  Mlp target_;
};

// Row-aligned on-policy batch.
struct AgentBatch {
  Matrix observations;
  Matrix skills;
  Matrix actions;
  Vector rewards;
  Matrix next_observations;

  int size() const { return static_cast<int>(observations.rows()); }
};

struct UpdateReport {
  double critic_loss = 0.0;
  double policy_loss = 0.0;
  double mean_log_density = 0.0;
  double mean_q = 0.0;
};

struct PolicyObjective {
  // beta * E[log pi] - E[Q]; minimized.
  double loss = 0.0;
  double mean_log_density = 0.0;
  double mean_q = 0.0;
};

// Entropy-regularized actor-critic with a single critic and a fixed entropy
// coefficient.
class Agent {
 public:
  Agent() = default;
  Agent(int observation_dim, int skill_dim, int action_dim, AgentConfig config,
        RngStream& rng);

  const AgentConfig& config() const { return config_; }
  SkillConditionedPolicy& policy() { return policy_; }
  const SkillConditionedPolicy& policy() const { return policy_; }
  Critic& critic() { return critic_; }
  const Critic& critic() const { return critic_; }
  Adam& policy_optimizer() { return policy_adam_; }
  Adam& critic_optimizer() { return critic_adam_; }
  const Adam& policy_optimizer() const { return policy_adam_; }
  const Adam& critic_optimizer() const { return critic_adam_; }

  // One critic step toward r + gamma (Q_target(s', a') - beta log pi(a'|s')),
  // one policy step on beta log pi(a~|s) - Q(s, a~), then the target update.
  UpdateReport Update(const AgentBatch& batch, RngStream& rng);

  // Evaluates the policy loss for fixed reparameterization noise.
  PolicyObjective EvaluatePolicyObjective(const AgentBatch& batch,
                                          const Matrix& noise,
                                          double entropy_coeff) const;

 private:
  AgentConfig config_;
  SkillConditionedPolicy policy_;
  Critic critic_;
  Adam policy_adam_;
  Adam critic_adam_;
};

// Anything that turns (policy observation, skill) into an action.
class SkillController {
 public:
  virtual ~SkillController() = default;
  virtual Vector Act(const Vector& observation, const Vector& skill,
                     RngStream& rng) const = 0;
};

class PolicyController final : public SkillController {
 public:
  PolicyController(const SkillConditionedPolicy& policy, bool deterministic)
      : policy_(policy), deterministic_(deterministic) {}
  Vector Act(const Vector& observation, const Vector& skill,
             RngStream& rng) const override {
    return policy_.Act(observation, skill, rng, deterministic_).action;
  }

 private:
  const SkillConditionedPolicy& policy_;
  bool deterministic_;
};

// Uniform random actions in [-1, 1]^A; ignores the skill.
class RandomActionController final : public SkillController {
 public:
  explicit RandomActionController(int action_dim) : action_dim_(action_dim) {}
  Vector Act(const Vector& observation, const Vector& skill,
             RngStream& rng) const override;

 private:
  int action_dim_;
};

// The "skill" is the action itself (clipped to the bounds). Lets the latent
// planner drive the environment with raw actions.
class ActionPassThrough final : public SkillController {
 public:
  Vector Act(const Vector& observation, const Vector& skill,
             RngStream& rng) const override;
};

}  // namespace skillmpc

#endif  // SKILLMPC_AGENT_H_
