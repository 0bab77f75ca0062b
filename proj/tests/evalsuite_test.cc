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

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "skillmpc/error.h"
#include "skillmpc/evalsuite.h"

namespace skillmpc {
namespace {

using Eigen::Vector2d;

// p' = p + N(0, I); velocity slots unused.
class RandomWalk2D final : public Environment {
 public:
  RandomWalk2D() : Environment(EnvSpec{"walk", 4, 2, 50, 0.1, 1.0, 0.0, {2, 3}, {0, 1}}) {}
  Vector Reset(RngStream&) const override { return Vector::Zero(4); }
  std::unique_ptr<Environment> Clone() const override { return std::make_unique<RandomWalk2D>(*this); }

 protected:
  Vector Transition(const Vector& s, const Vector&, RngStream& rng) const override {
    Vector n = s;
    n[0] += rng.Normal();
    n[1] += rng.Normal();
    return n;
  }
};

// Deterministic constant drift: p' = p + v with v fixed at reset.
class Drift2D final : public Environment {
 public:
  Drift2D() : Environment(EnvSpec{"drift", 4, 2, 60, 0.1, 0.0, 0.0, {2, 3}, {0, 1}}) {}
  Vector Reset(RngStream&) const override {
    Vector s(4);
    s << 0.0, 0.0, 0.1, 0.05;
    return s;
  }
  std::unique_ptr<Environment> Clone() const override { return std::make_unique<Drift2D>(*this); }

 protected:
  Vector Transition(const Vector& s, const Vector&, RngStream&) const override {
    Vector n = s;
    n.head(2) += s.tail(2);
    return n;
  }
};

// Always pushes along +x.
class PlusX final : public SkillController {
 public:
  Vector Act(const Vector&, const Vector&, RngStream&) const override {
    return Vector(Vector2d(1.0, 0.0));
  }
};

TEST(DeltaMetricTest, StationaryAgentScoresOne) {
  const std::vector<Vector2d> u(7, Vector2d::Zero());
  EXPECT_DOUBLE_EQ(DeltaMetric(u, Vector2d(3.0, -4.0)), 1.0);
}

TEST(DeltaMetricTest, AgentAtTheGoalScoresZero) {
  const std::vector<Vector2d> u(5, Vector2d(3.0, -4.0));
  EXPECT_DOUBLE_EQ(DeltaMetric(u, Vector2d(3.0, -4.0)), 0.0);
}

TEST(DeltaMetricTest, TwoStepArithmetic) {
  EXPECT_DOUBLE_EQ(DeltaMetric({Vector2d(2.0, 0.0), Vector2d(4.0, 0.0)}, Vector2d(4.0, 0.0)), 0.25);
}

TEST(DeltaMetricTest, ScaleInvariant) {
  RngStream rng(1, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vector2d> u(10), scaled(10);
    const Vector2d g(rng.Uniform(-8, 8), rng.Uniform(-8, 8));
    const double c = rng.Uniform(0.01, 100.0);
    for (int t = 0; t < 10; ++t) {
      u[t] = Vector2d(rng.Normal(), rng.Normal());
      scaled[t] = c * u[t];
    }
    EXPECT_NEAR(DeltaMetric(u, g), DeltaMetric(scaled, c * g), 1e-12);
  }
}

TEST(DeltaMetricTest, ZeroGoalAndEmptyTrajectoryRejected) {
  EXPECT_THROW(DeltaMetric({Vector2d(1.0, 1.0)}, Vector2d::Zero()), InvalidArgument);
  EXPECT_THROW(DeltaMetric({}, Vector2d(1.0, 0.0)), InvalidArgument);
}

TEST(ReachedGoalTest, EpsilonBall) {
  EXPECT_TRUE(ReachedGoal({Vector2d(0, 0), Vector2d(2.9, 0)}, Vector2d(4, 0), 1.2));
  EXPECT_FALSE(ReachedGoal({Vector2d(0, 0), Vector2d(2.7, 0)}, Vector2d(4, 0), 1.2));
}

TEST(GoalSetTest, SeedReproducibleAndInsideTheBox) {
  GoalSetConfig cfg;
  const auto a = SampleGoals(cfg, 2026), b = SampleGoals(cfg, 2026), c = SampleGoals(cfg, 7);
  ASSERT_EQ(a.size(), 10u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const Vector2d& g : a) {
    EXPECT_LE(g.cwiseAbs().maxCoeff(), 8.0);
    EXPECT_GE(g.norm(), cfg.min_norm);
  }
}

TEST(SkillVarianceTest, DeterministicRolloutsHaveZeroSpread) {
  EnvParams p;
  p.noise_std = 0.0;
  p.reset_std = 0.0;
  PointMass2D env(p);
  ActionPassThrough controller;
  RngStream rng(2, 0);
  const SkillVarianceTable t = SkillVariance(
      controller, env, {Vector(Vector2d(0.5, -0.3)), Vector(Vector2d(-1.0, 1.0))}, 3, rng);
  EXPECT_LT(t.mean, 1e-12);
  EXPECT_EQ(t.per_step.size(), 200u);
  for (double v : t.per_step) EXPECT_LT(v, 1e-12);
}

// For u_t ~ N(0, t I_2): spread sqrt(2t), mean norm sqrt(t) sqrt(pi/2), so
// the normalized std is 2 / sqrt(pi) at every step.
TEST(SkillVarianceTest, RandomWalkMatchesTheAnalyticConstant) {
  RandomWalk2D env;
  RandomActionController controller(2);
  RngStream rng(3, 0);
  const SkillVarianceTable t = SkillVariance(controller, env, {Vector::Zero(2)}, 2000, rng);
  const double oracle = 2.0 / std::sqrt(std::numbers::pi);
  EXPECT_NEAR(t.mean, oracle, 0.2 * oracle);
  EXPECT_NEAR(t.per_step.back(), oracle, 0.2 * oracle);
}

TEST(SkillVarianceTest, SingleEpisodeRejected) {
  PointMass2D env;
  ActionPassThrough controller;
  RngStream rng(4, 0);
  EXPECT_THROW(SkillVariance(controller, env, {Vector::Zero(2)}, 1, rng), InvalidArgument);
}

TEST(OrientationMapTest, PlusXPolicyHeadsAlongZero) {
  EnvParams p;
  p.noise_std = 0.0;
  PointMass2D env(p);
  PlusX controller;
  RngStream rng(5, 0);
  const OrientationMap map = ComputeOrientationMap(controller, env, 4, rng);
  ASSERT_EQ(map.headings.size(), 16u);
  for (double h : map.headings) EXPECT_NEAR(h, 0.0, 1e-3);
  EXPECT_LT(OrientationSmoothness(map), 0.1);
}

TEST(OrientationMapTest, SixteenBySixteenShape) {
  const std::vector<Vector> grid = SkillGrid(16);
  ASSERT_EQ(grid.size(), 256u);
  EXPECT_DOUBLE_EQ(grid.front()[0], -1.0 + 1.0 / 16);
  EXPECT_DOUBLE_EQ(grid.back()[1], 1.0 - 1.0 / 16);
  PointMass2D env;
  ActionPassThrough controller;
  RngStream rng(6, 0);
  const OrientationMap map = ComputeOrientationMap(controller, env, 16, rng);
  EXPECT_EQ(map.resolution, 16);
  EXPECT_EQ(map.headings.size(), 256u);
  EXPECT_EQ(map.displacements.size(), 256u);
}

TEST(OrientationMapTest, UndefinedHeadingsAreSkipped) {
  OrientationMap map;
  map.resolution = 2;
  map.headings = {0.0, std::nan(""), 0.5, std::nan("")};
  // Only the vertical pair (0, 2) is defined.
  EXPECT_NEAR(OrientationSmoothness(map), 0.5 * 180.0 / std::numbers::pi, 1e-12);
  // Headings either side of +-pi are close: two horizontal pairs differ by
  // 2 pi - 6.2 after wrapping, two vertical pairs by 0.
  map.headings = {3.1, -3.1, 3.1, -3.1};
  EXPECT_NEAR(OrientationSmoothness(map),
              0.5 * (2 * std::numbers::pi - 6.2) * 180.0 / std::numbers::pi, 1e-9);
}

// Zero network with the target normalizer mean at the true delta predicts
// the drift exactly.
TEST(PredictionErrorTest, PerfectModelGivesZeroCurve) {
  Drift2D env;
  RngStream rng(7, 0);
  SkillDynamicsModel model(SkillDynamicsConfig::ForEnvironment(env.spec(), 2, {8}), rng);
  for (int l = 0; l < model.network().num_layers(); ++l) {
    model.network().weight(l).value.setZero();
    model.network().bias(l).value.setZero();
  }
  model.input_normalizer().SetStatistics(Vector::Zero(2), Vector::Ones(2));
  Vector delta(4);
  delta << 0.0, 0.0, 0.1, 0.05;  // (vx, vy, x, y) order
  model.target_normalizer().SetStatistics(delta, Vector::Ones(4));
  ActionPassThrough controller;
  const auto curve = PredictionErrorCurve(model, controller, env, {Vector::Zero(2)}, 2, 50, rng);
  ASSERT_EQ(curve.size(), 50u);
  for (double e : curve) EXPECT_LT(e, 1e-12);
}

TEST(PredictionErrorTest, WrongDriftGrowsLinearlyInAbsoluteTerms) {
  Drift2D env;
  RngStream rng(8, 0);
  SkillDynamicsModel model(SkillDynamicsConfig::ForEnvironment(env.spec(), 2, {8}), rng);
  for (int l = 0; l < model.network().num_layers(); ++l) {
    model.network().weight(l).value.setZero();
    model.network().bias(l).value.setZero();
  }
  model.input_normalizer().SetStatistics(Vector::Zero(2), Vector::Ones(2));
  Vector delta(4);
  delta << 0.0, 0.0, 0.2, 0.1;  // twice the true drift
  model.target_normalizer().SetStatistics(delta, Vector::Ones(4));
  ActionPassThrough controller;
  const auto curve = PredictionErrorCurve(model, controller, env, {Vector::Zero(2)}, 2, 10, rng);
  // ||2 h v - h v|| / ||h v|| = 1 at every step.
  for (double e : curve) EXPECT_NEAR(e, 1.0, 1e-12);
}

TEST(NavigationTest, ExactSimulatorReachesGoals) {
  EnvParams p;
  p.noise_std = 0.0;
  PointMass2D env(p);
  ActionPassThrough controller;
  FunctionSimulator sim(2, [](const Vector& s, const Vector& a) {
    Vector n = s;
    n.tail(2) = (s.tail(2) + 0.1 * a).cwiseMax(-1.0).cwiseMin(1.0);
    n.head(2) += 0.1 * n.tail(2);
    return n;
  });
  PlannerConfig cfg = PlannerConfig::Dense();
  cfg.refine_steps = 3;
  RngStream rng(9, 0);
  const std::vector<Vector2d> goals{Vector2d(4.0, 3.0), Vector2d(-5.0, 2.0)};
  const NavigationReport r =
      EvaluateNavigation(controller, sim, env, goals, RewardMode::kDense, 1.0, cfg, rng);
  ASSERT_EQ(r.goals.size(), 2u);
  EXPECT_EQ(r.reached, 2);
  EXPECT_LT(r.mean_delta, 0.5);
  EXPECT_NEAR(r.mean_delta, 0.5 * (r.goals[0].delta + r.goals[1].delta), 1e-15);
}

TEST(BaselineTest, UnknownVariantRejected) {
  EXPECT_EQ(ParseBaselineVariant("random"), BaselineVariant::kRandom);
  EXPECT_EQ(ParseBaselineVariant("strong_oracle"), BaselineVariant::kStrongOracle);
  EXPECT_THROW(ParseBaselineVariant("oracle"), InvalidArgument);
}

TEST(BaselineTest, ZeroBudgetCannotNavigate) {
  PointMass2D env;
  BaselineConfig cfg;
  cfg.budget = 0;
  cfg.planner.refine_steps = 2;
  const std::vector<Vector2d> goals = SampleGoals(GoalSetConfig{4, 8.0, 6.0}, 3);
  const BaselineReport r = RunBaselineMbrl(cfg, env, goals, 11);
  EXPECT_EQ(r.steps_collected, 0);
  EXPECT_GT(r.navigation.mean_delta, 0.75);
  EXPECT_EQ(r.navigation.reached, 0);
}

TEST(BaselineTest, StrongOracleEvaluatesOneGoal) {
  PointMass2D env;
  BaselineConfig cfg;
  cfg.variant = BaselineVariant::kStrongOracle;
  cfg.budget = 400;
  cfg.transitions_per_iter = 200;
  cfg.hidden_sizes = {16};
  cfg.planner.refine_steps = 1;
  const std::vector<Vector2d> goals = SampleGoals(GoalSetConfig{3, 8.0, 2.0}, 5);
  const BaselineReport r = RunBaselineMbrl(cfg, env, goals, 12);
  EXPECT_EQ(r.steps_collected, 400);
  ASSERT_EQ(r.navigation.goals.size(), 1u);
  EXPECT_EQ(r.navigation.goals[0].goal, goals[0]);
}

}  // namespace
}  // namespace skillmpc
