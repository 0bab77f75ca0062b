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

#ifndef SKILLMPC_EVALSUITE_H_
#define SKILLMPC_EVALSUITE_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "skillmpc/agent.h"
#include "skillmpc/env.h"
#include "skillmpc/planner.h"
#include "skillmpc/rng.h"
#include "skillmpc/skill_dynamics.h"
#include "skillmpc/trainer.h"

namespace skillmpc {

struct GoalSetConfig {
  int count = 10;
  // Goals lie in [-box, box]^2.
  double box = 8.0;
  // Goals closer than this to the origin are redrawn.
  double min_norm = 2.0;
};

// Seed-reproducible goal set; identical seeds give identical goals.
std::vector<Eigen::Vector2d> SampleGoals(const GoalSetConfig& config,
                                         std::uint64_t seed);

// (1/H) sum_t ||g - u_t|| / ||g||.
double DeltaMetric(const std::vector<Eigen::Vector2d>& positions,
                   const Eigen::Vector2d& goal);

// True if any position lies within epsilon of the goal.
bool ReachedGoal(const std::vector<Eigen::Vector2d>& positions,
                 const Eigen::Vector2d& goal, double epsilon);

struct SkillVarianceTable {
  // Per environment step, averaged over skills.
  std::vector<double> per_step;
  // Per skill, averaged over steps.
  std::vector<double> per_skill;
  double mean = 0.0;
};

// For each skill: per-step spread of the position across episodes,
// sqrt(trace of the sample covariance), divided by the per-step mean of
// ||u_t|| over those episodes. Steps whose mean norm is below 1e-6 are
// skipped. Averaged per step across skills.
SkillVarianceTable SkillVariance(const SkillController& controller,
                                 Environment& env,
                                 const std::vector<Vector>& skills,
                                 int episodes_per_skill, RngStream& rng);

struct OrientationMap {
  int resolution = 0;
  // Row-major: cell (i, j) has skill (centers[i], centers[j]).
  std::vector<Vector> skills;
  // Heading of the final displacement in radians; NaN when undefined.
  std::vector<double> headings;
  std::vector<Eigen::Vector2d> displacements;
};

// Cell centers of a resolution x resolution grid over (-1, 1)^2.
std::vector<Vector> SkillGrid(int resolution);

// One episode per grid skill with `controller`; records atan2 of the final
// displacement from the start.
OrientationMap ComputeOrientationMap(const SkillController& controller,
                                     Environment& env, int resolution,
                                     RngStream& rng);

// Mean absolute heading difference between horizontally and vertically
// adjacent cells, in degrees (wrapped to [0, 180]). Undefined cells skipped.
double OrientationSmoothness(const OrientationMap& map);

// Per open-loop step h = 1..horizon: mean over skills and episodes of
// ||predicted u_h - actual u_h|| / ||actual u_h||. Predictions chain the
// model from the real initial state with the episode's skill.
std::vector<double> PredictionErrorCurve(const SkillDynamicsModel& model,
                                         const SkillController& controller,
                                         Environment& env,
                                         const std::vector<Vector>& skills,
                                         int episodes_per_skill, int horizon,
                                         RngStream& rng);

struct GoalResult {
  Eigen::Vector2d goal;
  double delta = 0.0;
  bool reached = false;
  double achieved_return = 0.0;
  Trajectory trajectory;
};

struct NavigationReport {
  std::vector<GoalResult> goals;
  double mean_delta = 0.0;
  double std_delta = 0.0;
  int reached = 0;
};

// Runs the planner once per goal and scores each episode.
NavigationReport EvaluateNavigation(const SkillController& controller,
                                    const LatentSimulator& simulator,
                                    Environment& env,
                                    const std::vector<Eigen::Vector2d>& goals,
                                    RewardMode mode, double epsilon,
                                    const PlannerConfig& config, RngStream& rng);

enum class BaselineVariant { kRandom, kStrongOracle };

BaselineVariant ParseBaselineVariant(const std::string& name);
std::string ToString(BaselineVariant variant);

struct BaselineConfig {
  BaselineVariant variant = BaselineVariant::kRandom;
  // Environment steps of model-training data.
  int budget = 500000;
  // Same schedule as skill discovery: M fresh steps then K1 fit steps per
  // iteration, fitted on all data gathered so far.
  int transitions_per_iter = 2000;
  int dynamics_steps = 32;
  int dynamics_batch = 128;
  std::vector<int> hidden_sizes{64, 64};
  int expert_count = kDefaultExpertCount;
  double learning_rate = kDefaultLearningRate;
  // Action-space MPPI: latents are raw actions.
  PlannerConfig planner = ActionPlannerDefaults();
  RewardMode mode = RewardMode::kDense;
  double epsilon = kDefaultSparseEpsilon;

  static PlannerConfig ActionPlannerDefaults();
};

struct BaselineReport {
  NavigationReport navigation;
  SkillDynamicsModel model;
  int steps_collected = 0;
};

// Trains an action-conditioned model on the variant's data (uniform random
// actions, or MPPI episodes aimed at goals[0] for the strong oracle, which
// then is evaluated on that goal only) and evaluates action MPPI.
BaselineReport RunBaselineMbrl(const BaselineConfig& config, Environment& env,
                               const std::vector<Eigen::Vector2d>& goals,
                               std::uint64_t seed);

}  // namespace skillmpc

#endif  // SKILLMPC_EVALSUITE_H_
