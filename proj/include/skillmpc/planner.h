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

#ifndef SKILLMPC_PLANNER_H_
#define SKILLMPC_PLANNER_H_

#include <functional>
#include <string>
#include <vector>

#include "skillmpc/agent.h"
#include "skillmpc/env.h"
#include "skillmpc/rng.h"
#include "skillmpc/skill_dynamics.h"

namespace skillmpc {

enum class ExecuteMode { kMean, kSample };

ExecuteMode ParseExecuteMode(const std::string& name);
std::string ToString(ExecuteMode mode);

struct PlannerConfig {
  // H_P: primitives in the plan.
  int plan_length = 1;
  // H_Z: environment steps each primitive is held.
  int hold_steps = 10;
  // R: refinement passes per planning round.
  int refine_steps = 10;
  // K: plans sampled per refinement.
  int samples = 50;
  // MPPI temperature.
  double gamma = 10.0;
  double smooth_beta = 0.9;
  // Selected on a held-out goal set (goal seed 7), not the test goals.
  double plan_std = 1.0;
  bool clip_latents = true;
  // H_E: real environment steps per episode.
  int episode_horizon = 200;
  ExecuteMode execute_mode = ExecuteMode::kMean;

  void Validate() const;

  // Dense navigation: H_P = 1, H_Z = 10, R = 10, K = 50.
  static PlannerConfig Dense();
  // Sparse navigation: H_P = 4, H_Z = 25, K = 200.
  static PlannerConfig Sparse();
};

// H_P independent Gaussians N(mu_i, plan_std^2 I) over the latent space.
// The covariance is fixed.
struct PlanDistribution {
  std::vector<Vector> means;
  double stddev = 0.3;

  int length() const { return static_cast<int>(means.size()); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }

  static PlanDistribution Zeros(int length, int dim, double stddev);
  // Drops mu_1 and appends a copy of the last mean.
  void Shift();
};

// Batched one-step simulator over (state, latent) rows.
class LatentSimulator {
 public:
  virtual ~LatentSimulator() = default;
  virtual int latent_dim() const = 0;
  virtual Matrix Step(const Matrix& states, const Matrix& latents) const = 0;
};

// Expected-value prediction from a frozen dynamics model; the conditioning
// input is the skill (or the action, for action-conditioned models).
class ModelSimulator final : public LatentSimulator {
 public:
  explicit ModelSimulator(const SkillDynamicsModel& model) : model_(model) {}
  int latent_dim() const override { return model_.config().conditioning_dim; }
  Matrix Step(const Matrix& states, const Matrix& latents) const override {
    return model_.PredictNextBatch(states, latents);
  }

 private:
  const SkillDynamicsModel& model_;
};

// Wraps an arbitrary row-wise transition function.
class FunctionSimulator final : public LatentSimulator {
 public:
  using Fn = std::function<Vector(const Vector& state, const Vector& latent)>;
  FunctionSimulator(int latent_dim, Fn fn) : dim_(latent_dim), fn_(std::move(fn)) {}
  int latent_dim() const override { return dim_; }
  Matrix Step(const Matrix& states, const Matrix& latents) const override;

 private:
  int dim_;
  Fn fn_;
};

// Reward of a single (real or simulated) state.
using StateReward = std::function<double(const Vector& state)>;

// Goal reward on the environment's global position coordinates.
StateReward MakeGoalReward(const Environment& env, const Eigen::Vector2d& goal,
                           RewardMode mode,
                           double epsilon = kDefaultSparseEpsilon);

// softmax(gamma * r) with the max subtracted first. Non-finite rewards get
// weight zero; if every reward is non-finite, throws NumericFault.
Vector MppiWeights(std::span<const double> rewards, double gamma);

// mu = sum_k w_k z_k over rows of `samples` (K x D).
Vector MppiMean(const Matrix& samples, const Vector& weights);

// In place: z'_i = beta z'_{i-1} + (1 - beta) z_i for i >= 2. `plan` holds
// one primitive per row.
void SmoothPlan(Matrix& plan, double beta);

struct RefineResult {
  double best_reward = 0.0;
  double mean_reward = 0.0;
  int excluded = 0;
};

// One MPPI refinement: samples K plans, simulates each H_P x H_Z steps from
// `state`, scores the sum of per-step rewards, and moves every mean to the
// softmax-weighted average of its samples. Neither the model nor any
// environment is touched.
RefineResult Refine(PlanDistribution& plan, const LatentSimulator& simulator,
                    const Vector& state, const StateReward& reward,
                    const PlannerConfig& config, RngStream& rng);

struct EpisodeResult {
  Trajectory trajectory;
  // Sum of the reward over executed real states.
  double achieved_return = 0.0;
  // Latent executed in each planning round.
  std::vector<Vector> executed_latents;
  int rounds = 0;
  int excluded_samples = 0;
};

// Plans and executes one episode of H_E real steps: per round, R refinements
// from the current real state, then mu_1 (or a sample from N_1) is held for
// H_Z steps through `controller`, then the plan shifts. A horizon that is not
// a multiple of H_Z ends with a shorter round.
EpisodeResult ExecuteEpisode(const SkillController& controller,
                             const LatentSimulator& simulator, Environment& env,
                             const StateReward& reward,
                             const PlannerConfig& config, RngStream& rng);

}  // namespace skillmpc

#endif  // SKILLMPC_PLANNER_H_
