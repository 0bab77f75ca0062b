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

#include "skillmpc/env.h"

#include <algorithm>
#include <cmath>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

Vector Gather(const Vector& v, const std::vector<int>& idx) {
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

void CheckParams(const EnvParams& p) {
  if (p.horizon <= 0) throw InvalidArgument("env horizon must be positive");
  if (!(p.dt > 0.0)) throw InvalidArgument("env dt must be positive");
  if (!(p.noise_std >= 0.0) || !(p.reset_std >= 0.0)) {
    throw InvalidArgument("env noise levels must be non-negative");
  }
}

}  // namespace

std::vector<int> EnvSpec::PolicyObservationIndices() const {
  std::vector<int> out;
  for (int i = 0; i < state_dim; ++i) {
    if (std::find(global_position_indices.begin(), global_position_indices.end(),
                  i) == global_position_indices.end()) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<int> EnvSpec::PredictedIndices() const {
  std::vector<int> out = dynamics_observation_indices;
  for (int g : global_position_indices) {
    if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
  }
  return out;
}

Vector Environment::Step(const Vector& state, const Vector& action,
                         RngStream& rng) {
  if (state.size() != spec_.state_dim || action.size() != spec_.action_dim) {
    throw DimensionError("Step: state/action size mismatch");
  }
  if (!state.allFinite() || !action.allFinite()) {
    throw NumericFault("Step: non-finite state or action");
  }
  Vector a = action;
  if ((a.array().abs() > 1.0).any()) {
    ++clip_events_;
    a = a.cwiseMax(-1.0).cwiseMin(1.0);
  }
  return Transition(state, a, rng);
}

Vector Environment::PolicyObservation(const Vector& state) const {
  return Gather(state, spec_.PolicyObservationIndices());
}

Vector Environment::DynamicsObservation(const Vector& state) const {
  return Gather(state, spec_.dynamics_observation_indices);
}

Eigen::Vector2d Environment::Position(const Vector& state) const {
  return {state[spec_.global_position_indices[0]],
          state[spec_.global_position_indices[1]]};
}

PointMass2D::PointMass2D(const EnvParams& params)
    : Environment(EnvSpec{"pointmass", 4, 2, params.horizon, params.dt,
                          params.noise_std, params.reset_std, {2, 3}, {0, 1}}) {
  CheckParams(params);
}

Vector PointMass2D::Reset(RngStream& rng) const {
  Vector s = Vector::Zero(4);
  if (spec_.reset_std > 0.0) {
    s[0] = rng.Normal(0.0, spec_.reset_std);
    s[1] = rng.Normal(0.0, spec_.reset_std);
  }
  return s;
}

Vector PointMass2D::Transition(const Vector& state, const Vector& action,
                               RngStream& rng) const {
  const double dt = spec_.dt;
  Vector next(4);
  for (int i = 0; i < 2; ++i) {
    const double v = std::clamp(state[2 + i] + action[i] * dt, -1.0, 1.0);
    next[i] = state[i] + v * dt;
    next[2 + i] = v;
  }
  if (spec_.noise_std > 0.0) {
    next[2] += rng.Normal(0.0, spec_.noise_std);
    next[3] += rng.Normal(0.0, spec_.noise_std);
  }
  return next;
}

std::unique_ptr<Environment> PointMass2D::Clone() const {
  return std::make_unique<PointMass2D>(*this);
}

Unicycle::Unicycle(const EnvParams& params)
    : Environment(EnvSpec{"unicycle", 4, 2, params.horizon, params.dt,
                          params.noise_std, params.reset_std, {2, 3}, {0, 1}}) {
  CheckParams(params);
}

Vector Unicycle::Reset(RngStream& rng) const {
  Vector s = Vector::Zero(4);
  if (spec_.reset_std > 0.0) s[2] = rng.Normal(0.0, spec_.reset_std);
  return s;
}

Vector Unicycle::Transition(const Vector& state, const Vector& action,
                            RngStream& rng) const {
  const double dt = spec_.dt;
  Vector next(4);
  next[2] = state[2] + action[0] * dt;
  next[3] = std::clamp(state[3] + action[1] * dt, 0.0, 1.0);
  next[0] = state[0] + next[3] * std::cos(next[2]) * dt;
  next[1] = state[1] + next[3] * std::sin(next[2]) * dt;
  if (spec_.noise_std > 0.0) next[2] += rng.Normal(0.0, spec_.noise_std);
  return next;
}

std::unique_ptr<Environment> Unicycle::Clone() const {
  return std::make_unique<Unicycle>(*this);
}

std::unique_ptr<Environment> MakeEnvironment(const std::string& name,
                                             const EnvParams& params) {
  if (name == "pointmass") return std::make_unique<PointMass2D>(params);
  if (name == "unicycle") return std::make_unique<Unicycle>(params);
  throw InvalidArgument("unknown environment '" + name + "'");
}

std::vector<Eigen::Vector2d> Trajectory::Positions(const Environment& env) const {
  std::vector<Eigen::Vector2d> out;
  out.reserve(transitions.size());
  for (const auto& t : transitions) out.push_back(env.Position(t.next_state));
  return out;
}

RewardMode ParseRewardMode(const std::string& name) {
  if (name == "dense") return RewardMode::kDense;
  if (name == "sparse") return RewardMode::kSparse;
  throw InvalidArgument("unknown reward mode '" + name + "'");
}

std::string ToString(RewardMode mode) {
  return mode == RewardMode::kDense ? "dense" : "sparse";
}

double GoalReward(const Eigen::Vector2d& position, const Eigen::Vector2d& goal,
                  RewardMode mode, double epsilon) {
  const double dist = (goal - position).norm();
  if (mode == RewardMode::kDense) return -dist;
  return dist <= epsilon ? 1.0 : 0.0;
}

}  // namespace skillmpc
