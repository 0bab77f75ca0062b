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

#ifndef SKILLMPC_ENV_H_
#define SKILLMPC_ENV_H_

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

#include "skillmpc/autodiff.h"
#include "skillmpc/rng.h"

namespace skillmpc {

struct EnvSpec {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
  // Episode length T.
  int horizon = 200;
  double dt = 0.1;
  double noise_std = 0.0;
  double reset_std = 0.0;
  // State coordinates fed to the skill-dynamics model.
  std::vector<int> dynamics_observation_indices;
  // The (x, y) coordinates used for goals; excluded from policy input.
  std::vector<int> global_position_indices;

  // Every coordinate not in global_position_indices, ascending.
  std::vector<int> PolicyObservationIndices() const;
  // dynamics_observation_indices followed by any global position index not
  // already in it: the coordinates whose deltas the dynamics model predicts.
  std::vector<int> PredictedIndices() const;
};

struct EnvParams {
  int horizon = 200;
  double dt = 0.1;
  double noise_std = 0.05;
  double reset_std = 0.01;
};

// Episodic environment. Actions live in [-1, 1]^action_dim; out-of-range
// actions are clipped and counted.
class Environment {
 public:
  virtual ~Environment() = default;

  const EnvSpec& spec() const { return spec_; }

  virtual Vector Reset(RngStream& rng) const = 0;
  // Validates, clips and advances one step.
  Vector Step(const Vector& state, const Vector& action, RngStream& rng);

  Vector PolicyObservation(const Vector& state) const;
  Vector DynamicsObservation(const Vector& state) const;
  Eigen::Vector2d Position(const Vector& state) const;

  long clip_events() const { return clip_events_; }
  void reset_clip_events() { clip_events_ = 0; }

  virtual std::unique_ptr<Environment> Clone() const = 0;

 protected:
  explicit Environment(EnvSpec spec) : spec_(std::move(spec)) {}
  // `action` is already inside the bounds.
  virtual Vector Transition(const Vector& state, const Vector& action,
                            RngStream& rng) const = 0;

  EnvSpec spec_;

 private:
  long clip_events_ = 0;
};

// State (x, y, vx, vy); action = planar acceleration. Semi-implicit Euler:
// v' = clip(v + a dt, +-1), p' = p + v' dt, then Gaussian noise on v'.
class PointMass2D final : public Environment {
 public:
  explicit PointMass2D(const EnvParams& params = {});
  Vector Reset(RngStream& rng) const override;
  std::unique_ptr<Environment> Clone() const override;

 protected:
  Vector Transition(const Vector& state, const Vector& action,
                    RngStream& rng) const override;
};

// State (x, y, theta, v); action = (turn rate, acceleration).
// theta' = theta + a1 dt (+ noise), v' = clip(v + a2 dt, [0, 1]),
// p' = p + v' (cos theta', sin theta') dt.
class Unicycle final : public Environment {
 public:
  explicit Unicycle(const EnvParams& params = {});
  Vector Reset(RngStream& rng) const override;
  std::unique_ptr<Environment> Clone() const override;

 protected:
  Vector Transition(const Vector& state, const Vector& action,
                    RngStream& rng) const override;
};

// "pointmass" or "unicycle".
std::unique_ptr<Environment> MakeEnvironment(const std::string& name,
                                             const EnvParams& params);

struct Transition {
  Vector state;
  Vector action;
  Vector next_state;
  Vector skill;
  double intrinsic_reward = 0.0;
  int episode_id = 0;
  int step_index = 0;
};

struct Trajectory {
  std::vector<Transition> transitions;

  int size() const { return static_cast<int>(transitions.size()); }
  // Positions after each step (u_1 .. u_H).
  std::vector<Eigen::Vector2d> Positions(const Environment& env) const;
};

enum class RewardMode { kDense, kSparse };

RewardMode ParseRewardMode(const std::string& name);
std::string ToString(RewardMode mode);

inline constexpr double kDefaultSparseEpsilon = 2.0;

// Dense: -||g - u||. Sparse: 1 if ||u - g|| <= epsilon, else 0.
double GoalReward(const Eigen::Vector2d& position, const Eigen::Vector2d& goal,
                  RewardMode mode, double epsilon = kDefaultSparseEpsilon);

}  // namespace skillmpc

#endif  // SKILLMPC_ENV_H_
