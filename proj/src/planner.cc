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

#include "skillmpc/planner.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skillmpc/error.h"

namespace skillmpc {

ExecuteMode ParseExecuteMode(const std::string& name) {
  if (name == "mean") return ExecuteMode::kMean;
  if (name == "sample") return ExecuteMode::kSample;
  throw ConfigError("planner.execute_mode must be mean or sample, got '" + name + "'");
}

std::string ToString(ExecuteMode mode) {
  return mode == ExecuteMode::kMean ? "mean" : "sample";
}

void PlannerConfig::Validate() const {
  if (plan_length < 1 || hold_steps < 1 || refine_steps < 0 ||
      episode_horizon < 1) {
    throw ConfigError("planner: hp, hz, horizon must be >= 1 and refine_steps >= 0");
  }
  if (samples < 1) throw InvalidArgument("planner: K must be >= 1");
  if (!(gamma > 0.0)) throw ConfigError("planner.gamma must be > 0");
  if (!(smooth_beta >= 0.0 && smooth_beta <= 1.0)) {
    throw ConfigError("planner.smooth_beta must lie in [0, 1]");
  }
  if (!(plan_std >= 0.0)) throw ConfigError("planner.plan_std must be >= 0");
}

PlannerConfig PlannerConfig::Dense() { return PlannerConfig{}; }

PlannerConfig PlannerConfig::Sparse() {
  PlannerConfig c;
  c.plan_length = 4;
  c.hold_steps = 25;
  c.samples = 200;
  return c;
}

PlanDistribution PlanDistribution::Zeros(int length, int dim, double stddev) {
  if (length < 1 || dim < 1) throw InvalidArgument("plan needs length and dim >= 1");
  PlanDistribution p;
  p.means.assign(length, Vector::Zero(dim));
  p.stddev = stddev;
  return p;
}

void PlanDistribution::Shift() {
  if (means.empty()) return;
  std::rotate(means.begin(), means.begin() + 1, means.end());
  if (means.size() > 1) means.back() = means[means.size() - 2];
}

Matrix FunctionSimulator::Step(const Matrix& states, const Matrix& latents) const {
  if (states.rows() != latents.rows() || latents.cols() != dim_) {
    throw DimensionError("simulator: state/latent batch mismatch");
  }
  Matrix out(states.rows(), states.cols());
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    const Vector next = fn_(states.row(r).transpose(), latents.row(r).transpose());
    if (next.size() != states.cols()) throw DimensionError("simulator: bad state width");
    out.row(r) = next.transpose();
  }
  return out;
}

StateReward MakeGoalReward(const Environment& env, const Eigen::Vector2d& goal,
                           RewardMode mode, double epsilon) {
  const std::vector<int> idx = env.spec().global_position_indices;
  if (idx.size() != 2) throw DimensionError("goal reward needs two position coordinates");
  return [idx, goal, mode, epsilon](const Vector& s) {
    return GoalReward(Eigen::Vector2d(s[idx[0]], s[idx[1]]), goal, mode, epsilon);
  };
}

Vector MppiWeights(std::span<const double> rewards, double gamma) {
  if (rewards.empty()) throw InvalidArgument("MPPI: no samples");
  double max_r = -std::numeric_limits<double>::infinity();
  for (double r : rewards) {
    if (std::isfinite(r)) max_r = std::max(max_r, r);
  }
  if (!std::isfinite(max_r)) throw NumericFault("MPPI: every simulated reward is non-finite");
  Vector w(rewards.size());
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    w[k] = std::isfinite(rewards[k]) ? std::exp(gamma * (rewards[k] - max_r)) : 0.0;
  }
  return w / w.sum();
}

Vector MppiMean(const Matrix& samples, const Vector& weights) {
  if (samples.rows() != weights.size()) throw DimensionError("MPPI: weights/samples mismatch");
  return samples.transpose() * weights;
}

void SmoothPlan(Matrix& plan, double beta) {
  for (Eigen::Index i = 1; i < plan.rows(); ++i) {
    plan.row(i) = beta * plan.row(i - 1) + (1.0 - beta) * plan.row(i);
  }
}

RefineResult Refine(PlanDistribution& plan, const LatentSimulator& simulator,
                    const Vector& state, const StateReward& reward,
                    const PlannerConfig& config, RngStream& rng) {
  config.Validate();
  const int hp = plan.length();
  const int dim = plan.dim();
  const int k_count = config.samples;
  if (hp < 1) throw InvalidArgument("refine: empty plan");
  if (dim != simulator.latent_dim()) throw DimensionError("refine: latent dim mismatch");
  if (!state.allFinite()) throw NumericFault("refine: non-finite state");

  // samples[i] holds the K draws of primitive i.
  std::vector<Matrix> samples(hp, Matrix(k_count, dim));
  Matrix one(hp, dim);
  for (int k = 0; k < k_count; ++k) {
    for (int i = 0; i < hp; ++i) {
      for (int d = 0; d < dim; ++d) one(i, d) = plan.means[i][d] + plan.stddev * rng.Normal();
    }
    if (hp > 1) SmoothPlan(one, config.smooth_beta);
    if (config.clip_latents) one = one.cwiseMax(-1.0).cwiseMin(1.0);
    for (int i = 0; i < hp; ++i) samples[i].row(k) = one.row(i);
  }

  Matrix states = state.transpose().replicate(k_count, 1);
  std::vector<double> returns(k_count, 0.0);
  for (int i = 0; i < hp; ++i) {
    for (int t = 0; t < config.hold_steps; ++t) {
      states = simulator.Step(states, samples[i]);
      for (int k = 0; k < k_count; ++k) returns[k] += reward(states.row(k).transpose());
    }
  }

  RefineResult result;
  result.best_reward = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int finite = 0;
  for (double r : returns) {
    if (!std::isfinite(r)) {
      ++result.excluded;
      continue;
    }
    result.best_reward = std::max(result.best_reward, r);
    sum += r;
    ++finite;
  }
  const Vector w = MppiWeights(returns, config.gamma);
  result.mean_reward = sum / finite;
  for (int i = 0; i < hp; ++i) plan.means[i] = MppiMean(samples[i], w);
  return result;
}

EpisodeResult ExecuteEpisode(const SkillController& controller,
                             const LatentSimulator& simulator, Environment& env,
                             const StateReward& reward,
                             const PlannerConfig& config, RngStream& rng) {
  config.Validate();
  PlanDistribution plan =
      PlanDistribution::Zeros(config.plan_length, simulator.latent_dim(), config.plan_std);
  EpisodeResult result;
  Vector state = env.Reset(rng);
  int step = 0;
  while (step < config.episode_horizon) {
    for (int r = 0; r < config.refine_steps; ++r) {
      result.excluded_samples += Refine(plan, simulator, state, reward, config, rng).excluded;
    }
    Vector latent = plan.means[0];
    if (config.execute_mode == ExecuteMode::kSample) {
      for (int d = 0; d < latent.size(); ++d) latent[d] += plan.stddev * rng.Normal();
      if (config.clip_latents) latent = latent.cwiseMax(-1.0).cwiseMin(1.0);
    }
    result.executed_latents.push_back(latent);
    const int hold = std::min(config.hold_steps, config.episode_horizon - step);
    for (int t = 0; t < hold; ++t, ++step) {
      Transition tr;
      tr.state = state;
      tr.skill = latent;
      tr.action = controller.Act(env.PolicyObservation(state), latent, rng);
      tr.next_state = env.Step(state, tr.action, rng);
      tr.step_index = step;
      state = tr.next_state;
      result.achieved_return += reward(state);
      result.trajectory.transitions.push_back(std::move(tr));
    }
    ++result.rounds;
    plan.Shift();
  }
  return result;
}

}  // namespace skillmpc
