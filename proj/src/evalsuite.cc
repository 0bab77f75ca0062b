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

#include "skillmpc/evalsuite.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

constexpr double kMinNorm = 1e-6;

Eigen::Vector2d PositionOf(const Environment& env, const Vector& state) {
  return env.Position(state);
}

void AppendRows(Matrix& dst, const Matrix& src) {
  const Eigen::Index old = dst.rows();
  if (old == 0) {
    dst = src;
    return;
  }
  dst.conservativeResize(old + src.rows(), Eigen::NoChange);
  dst.bottomRows(src.rows()) = src;
}

}  // namespace

std::vector<Eigen::Vector2d> SampleGoals(const GoalSetConfig& config,
                                         std::uint64_t seed) {
  if (config.count < 0) throw InvalidArgument("goal count must be >= 0");
  if (!(config.box > 0.0) || config.min_norm >= config.box) {
    throw InvalidArgument("goal box must be positive and larger than min_norm");
  }
  RngStream rng(seed, 0x60a1);
  std::vector<Eigen::Vector2d> goals;
  while (static_cast<int>(goals.size()) < config.count) {
    Eigen::Vector2d g(rng.Uniform(-config.box, config.box),
                      rng.Uniform(-config.box, config.box));
    if (g.norm() >= config.min_norm) goals.push_back(g);
  }
  return goals;
}

double DeltaMetric(const std::vector<Eigen::Vector2d>& positions,
                   const Eigen::Vector2d& goal) {
  const double gn = goal.norm();
  if (!(gn > 0.0)) throw InvalidArgument("delta metric needs a nonzero goal");
  if (positions.empty()) throw InvalidArgument("delta metric needs H >= 1 positions");
  double sum = 0.0;
  for (const auto& u : positions) sum += (goal - u).norm();
  return sum / (gn * static_cast<double>(positions.size()));
}

bool ReachedGoal(const std::vector<Eigen::Vector2d>& positions,
                 const Eigen::Vector2d& goal, double epsilon) {
  for (const auto& u : positions) {
    if (GoalReward(u, goal, RewardMode::kSparse, epsilon) > 0.0) return true;
  }
  return false;
}

SkillVarianceTable SkillVariance(const SkillController& controller,
                                 Environment& env,
                                 const std::vector<Vector>& skills,
                                 int episodes_per_skill, RngStream& rng) {
  if (episodes_per_skill < 2) throw InvalidArgument("skill variance needs >= 2 episodes per skill");
  if (skills.empty()) throw InvalidArgument("skill variance needs at least one skill");
  const int horizon = env.spec().horizon;
  const int n = episodes_per_skill;
  SkillVarianceTable table;
  std::vector<double> step_sum(horizon, 0.0);
  std::vector<int> step_count(horizon, 0);
  for (const Vector& z : skills) {
    // positions[e][t]
    std::vector<std::vector<Eigen::Vector2d>> positions;
    for (int e = 0; e < n; ++e) {
      positions.push_back(RollOut(controller, env, z, rng).Positions(env));
    }
    double skill_sum = 0.0;
    int skill_count = 0;
    for (int t = 0; t < horizon; ++t) {
      Eigen::Vector2d mean = Eigen::Vector2d::Zero();
      double mean_norm = 0.0;
      for (int e = 0; e < n; ++e) {
        mean += positions[e][t];
        mean_norm += positions[e][t].norm();
      }
      mean /= n;
      mean_norm /= n;
      if (mean_norm < kMinNorm) continue;
      double var = 0.0;
      for (int e = 0; e < n; ++e) var += (positions[e][t] - mean).squaredNorm();
      const double ratio = std::sqrt(var / (n - 1)) / mean_norm;
      step_sum[t] += ratio;
      ++step_count[t];
      skill_sum += ratio;
      ++skill_count;
    }
    table.per_skill.push_back(skill_count > 0 ? skill_sum / skill_count
                                              : std::numeric_limits<double>::quiet_NaN());
  }
  double total = 0.0;
  int total_count = 0;
  table.per_step.resize(horizon);
  for (int t = 0; t < horizon; ++t) {
    if (step_count[t] == 0) {
      table.per_step[t] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    table.per_step[t] = step_sum[t] / step_count[t];
    total += table.per_step[t];
    ++total_count;
  }
  table.mean = total_count > 0 ? total / total_count
                               : std::numeric_limits<double>::quiet_NaN();
  return table;
}

std::vector<Vector> SkillGrid(int resolution) {
  if (resolution < 1) throw InvalidArgument("grid resolution must be >= 1");
  std::vector<Vector> grid;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      Vector z(2);
      z << -1.0 + (2.0 * i + 1.0) / resolution, -1.0 + (2.0 * j + 1.0) / resolution;
      grid.push_back(z);
    }
  }
  return grid;
}

OrientationMap ComputeOrientationMap(const SkillController& controller,
                                     Environment& env, int resolution,
                                     RngStream& rng) {
  OrientationMap map;
  map.resolution = resolution;
  map.skills = SkillGrid(resolution);
  for (const Vector& z : map.skills) {
    const Trajectory traj = RollOut(controller, env, z, rng);
    const Eigen::Vector2d start = PositionOf(env, traj.transitions.front().state);
    const Eigen::Vector2d d = PositionOf(env, traj.transitions.back().next_state) - start;
    map.displacements.push_back(d);
    map.headings.push_back(d.norm() < kMinNorm ? std::numeric_limits<double>::quiet_NaN()
                                               : std::atan2(d.y(), d.x()));
  }
  return map;
}

double OrientationSmoothness(const OrientationMap& map) {
  const int n = map.resolution;
  double sum = 0.0;
  int count = 0;
  auto diff = [&](double a, double b) {
    if (std::isnan(a) || std::isnan(b)) return;
    double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    if (d > std::numbers::pi) d = 2.0 * std::numbers::pi - d;
    sum += d * 180.0 / std::numbers::pi;
    ++count;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double h = map.headings[i * n + j];
      if (i + 1 < n) diff(h, map.headings[(i + 1) * n + j]);
      if (j + 1 < n) diff(h, map.headings[i * n + j + 1]);
    }
  }
  return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> PredictionErrorCurve(const SkillDynamicsModel& model,
                                         const SkillController& controller,
                                         Environment& env,
                                         const std::vector<Vector>& skills,
                                         int episodes_per_skill, int horizon,
                                         RngStream& rng) {
  if (horizon < 1) throw InvalidArgument("prediction horizon must be >= 1");
  if (horizon > env.spec().horizon) throw InvalidArgument("prediction horizon exceeds the episode");
  if (!model.ready()) throw UninitializedModel("prediction error needs a fitted model");
  std::vector<double> sum(horizon, 0.0);
  std::vector<int> count(horizon, 0);
  for (const Vector& z : skills) {
    for (int e = 0; e < episodes_per_skill; ++e) {
      const Trajectory traj = RollOut(controller, env, z, rng);
      Vector predicted = traj.transitions.front().state;
      for (int h = 0; h < horizon; ++h) {
        predicted = model.PredictNext(predicted, z);
        const Eigen::Vector2d actual = PositionOf(env, traj.transitions[h].next_state);
        const double norm = actual.norm();
        if (norm < kMinNorm) continue;
        sum[h] += (PositionOf(env, predicted) - actual).norm() / norm;
        ++count[h];
      }
    }
  }
  std::vector<double> curve(horizon);
  for (int h = 0; h < horizon; ++h) {
    curve[h] = count[h] > 0 ? sum[h] / count[h] : std::numeric_limits<double>::quiet_NaN();
  }
  return curve;
}

NavigationReport EvaluateNavigation(const SkillController& controller,
                                    const LatentSimulator& simulator,
                                    Environment& env,
                                    const std::vector<Eigen::Vector2d>& goals,
                                    RewardMode mode, double epsilon,
                                    const PlannerConfig& config, RngStream& rng) {
  NavigationReport report;
  for (const auto& g : goals) {
    EpisodeResult ep = ExecuteEpisode(controller, simulator, env,
                                      MakeGoalReward(env, g, mode, epsilon), config, rng);
    GoalResult r;
    r.goal = g;
    const auto positions = ep.trajectory.Positions(env);
    r.delta = DeltaMetric(positions, g);
    r.reached = ReachedGoal(positions, g, epsilon);
    r.achieved_return = ep.achieved_return;
    r.trajectory = std::move(ep.trajectory);
    report.mean_delta += r.delta;
    report.reached += r.reached ? 1 : 0;
    report.goals.push_back(std::move(r));
  }
  if (!goals.empty()) {
    report.mean_delta /= static_cast<double>(goals.size());
    double var = 0.0;
    for (const auto& r : report.goals) var += (r.delta - report.mean_delta) * (r.delta - report.mean_delta);
    report.std_delta = std::sqrt(var / static_cast<double>(goals.size()));
  }
  return report;
}

BaselineVariant ParseBaselineVariant(const std::string& name) {
  if (name == "random") return BaselineVariant::kRandom;
  if (name == "strong_oracle") return BaselineVariant::kStrongOracle;
  throw InvalidArgument("unknown baseline variant '" + name +
                        "' (expected random or strong_oracle)");
}

std::string ToString(BaselineVariant variant) {
  return variant == BaselineVariant::kRandom ? "random" : "strong_oracle";
}

PlannerConfig BaselineConfig::ActionPlannerDefaults() {
  PlannerConfig c;
  c.plan_length = 20;
  c.hold_steps = 1;
  c.refine_steps = 10;
  c.samples = 50;
  return c;
}

BaselineReport RunBaselineMbrl(const BaselineConfig& config, Environment& env,
                               const std::vector<Eigen::Vector2d>& goals,
                               std::uint64_t seed) {
  if (config.budget < 0) throw InvalidArgument("baseline budget must be >= 0");
  if (goals.empty()) throw InvalidArgument("baseline needs at least one goal");
  config.planner.Validate();
  const EnvSpec& spec = env.spec();
  RngStream init(seed, 0), collect(seed, 1), fit(seed, 2), eval(seed, 5);

  BaselineReport report;
  report.model = SkillDynamicsModel(
      SkillDynamicsConfig::ForEnvironment(spec, spec.action_dim, config.hidden_sizes,
                                          config.expert_count),
      init);
  SkillDynamicsModel& model = report.model;
  Adam adam(AdamOptions{config.learning_rate});
  const ActionPassThrough pass_through;
  const RandomActionController random_actions(spec.action_dim);
  const ModelSimulator simulator(model);
  const SkillSpace action_space(SkillKind::kContinuous, spec.action_dim);
  const StateReward oracle_reward =
      MakeGoalReward(env, goals.front(), config.mode, config.epsilon);

  DynamicsBatch data;
  while (report.steps_collected < config.budget) {
    const int want = std::min(config.transitions_per_iter,
                              config.budget - report.steps_collected);
    std::vector<Transition> fresh;
    if (config.variant == BaselineVariant::kRandom || !model.ready()) {
      fresh = CollectRollouts(random_actions, env, action_space, want, collect);
    } else {
      PlannerConfig pc = config.planner;
      while (static_cast<int>(fresh.size()) < want) {
        EpisodeResult ep = ExecuteEpisode(pass_through, simulator, env, oracle_reward, pc, collect);
        for (auto& tr : ep.trajectory.transitions) fresh.push_back(std::move(tr));
      }
    }
    fresh.resize(std::min<std::size_t>(fresh.size(), want));
    report.steps_collected += static_cast<int>(fresh.size());
    const DynamicsBatch batch = DynamicsBatch::FromTransitionsWithActions(fresh);
    AppendRows(data.states, batch.states);
    AppendRows(data.conditioning, batch.conditioning);
    AppendRows(data.next_states, batch.next_states);

    model.UpdateNormalizers(data);
    const int bs = std::min(config.dynamics_batch, data.size());
    std::vector<int> rows(bs);
    for (int k = 0; k < config.dynamics_steps; ++k) {
      for (int i = 0; i < bs; ++i) rows[i] = fit.UniformInt(data.size());
      model.FitStep(data.Rows(rows), adam);
    }
  }
  if (!model.ready()) {
    // No data: leave the network at its initialization with unit statistics.
    const int in = static_cast<int>(model.config().input_indices.size());
    const int p = model.predicted_dim();
    model.input_normalizer().SetStatistics(Vector::Zero(in), Vector::Ones(in));
    model.target_normalizer().SetStatistics(Vector::Zero(p), Vector::Ones(p));
  }

  std::vector<Eigen::Vector2d> eval_goals = goals;
  if (config.variant == BaselineVariant::kStrongOracle) eval_goals.resize(1);
  report.navigation = EvaluateNavigation(pass_through, simulator, env, eval_goals,
                                         config.mode, config.epsilon, config.planner, eval);
  return report;
}

}  // namespace skillmpc
