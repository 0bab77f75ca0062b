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
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "skillmpc/error.h"
#include "skillmpc/planner.h"

namespace skillmpc {
namespace {

// s' = s + scale * z on 2D states, recording every latent batch it sees.
class RecordingSimulator final : public LatentSimulator {
 public:
  explicit RecordingSimulator(double scale = 0.1) : scale_(scale) {}
  int latent_dim() const override { return 2; }
  Matrix Step(const Matrix& states, const Matrix& latents) const override {
    seen.push_back(latents);
    return states + scale_ * latents;
  }
  mutable std::vector<Matrix> seen;

 private:
  double scale_;
};

StateReward DistanceTo(double gx, double gy) {
  return [gx, gy](const Vector& s) { return -std::hypot(s[0] - gx, s[1] - gy); };
}

TEST(MppiTest, ClosedFormTwoSamples) {
  const std::vector<double> rewards{0.0, std::log(3.0)};
  const Vector w = MppiWeights(rewards, 1.0);
  EXPECT_NEAR(w[0], 0.25, 1e-12);
  EXPECT_NEAR(w[1], 0.75, 1e-12);
  Matrix z(2, 1);
  z << 0.0, 1.0;
  EXPECT_NEAR(MppiMean(z, w)[0], 0.75, 1e-12);
}

TEST(MppiTest, EqualRewardsGiveTheArithmeticMean) {
  RngStream rng(1, 0);
  Matrix z(7, 3);
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.Normal();
  const std::vector<double> rewards(7, -2.5);
  const Vector mean = MppiMean(z, MppiWeights(rewards, 10.0));
  const Vector expected = z.colwise().mean().transpose();
  EXPECT_LT((mean - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MppiTest, ShiftInvariantExactly) {
  // Dyadic rewards keep r + c and the max-shift exact.
  const std::vector<double> r{0.5, -0.25, 1.0, -3.0};
  for (double c : {8.0, -64.0, 1024.0}) {
    std::vector<double> shifted;
    for (double x : r) shifted.push_back(x + c);
    EXPECT_EQ(MppiWeights(r, 10.0), MppiWeights(shifted, 10.0)) << "c = " << c;
  }
}

TEST(MppiTest, ShiftInvariantForArbitraryRewards) {
  RngStream rng(2, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> r(20), shifted(20);
    const double c = rng.Uniform(-100.0, 100.0);
    for (int k = 0; k < 20; ++k) shifted[k] = (r[k] = rng.Normal()) + c;
    EXPECT_LT((MppiWeights(r, 10.0) - MppiWeights(shifted, 10.0)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MppiTest, WeightsAreAProbabilityVector) {
  RngStream rng(3, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> r(1 + rng.UniformInt(60));
    for (double& x : r) x = rng.Normal(0.0, 50.0);
    const Vector w = MppiWeights(r, 10.0);
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  }
}

TEST(MppiTest, NonFiniteRewardsGetZeroWeight) {
  const std::vector<double> r{std::nan(""), 0.0, -std::numeric_limits<double>::infinity(), 0.0};
  const Vector w = MppiWeights(r, 10.0);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_EQ(w[2], 0.0);
  EXPECT_DOUBLE_EQ(w[1], 0.5);
  const std::vector<double> none{std::nan(""), std::numeric_limits<double>::infinity()};
  EXPECT_THROW(MppiWeights(none, 10.0), NumericFault);
}

TEST(SmoothPlanTest, ZeroBetaLeavesSamplesUnchanged) {
  Matrix plan(3, 2);
  plan << 1, 2, 3, 4, 5, 6;
  Matrix copy = plan;
  SmoothPlan(copy, 0.0);
  EXPECT_EQ(copy, plan);
}

TEST(SmoothPlanTest, ConstantPlanIsAFixedPoint) {
  Matrix plan = Matrix::Constant(4, 2, 0.375);
  for (double beta : {0.0, 0.25, 0.9, 1.0}) {
    Matrix copy = plan;
    SmoothPlan(copy, beta);
    EXPECT_LT((copy - plan).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(SmoothPlanTest, RecurrenceArithmetic) {
  Matrix plan(3, 1);
  plan << 1.0, 0.0, 0.0;
  SmoothPlan(plan, 0.9);
  EXPECT_DOUBLE_EQ(plan(0, 0), 1.0);
  EXPECT_NEAR(plan(1, 0), 0.9, 1e-15);
  EXPECT_NEAR(plan(2, 0), 0.81, 1e-15);
}

PlannerConfig SmallRefine(int hp, int hz, int k) {
  PlannerConfig c;
  c.plan_length = hp;
  c.hold_steps = hz;
  c.samples = k;
  return c;
}

TEST(RefineTest, ZeroSamplesRejected) {
  RecordingSimulator sim;
  PlanDistribution plan = PlanDistribution::Zeros(1, 2, 0.3);
  RngStream rng(4, 0);
  EXPECT_THROW(Refine(plan, sim, Vector::Zero(2), DistanceTo(1, 1), SmallRefine(1, 1, 0), rng),
               InvalidArgument);
}

TEST(RefineTest, MeansStayInsideTheSampleHull) {
  RngStream rng(5, 0);
  for (int trial = 0; trial < 50; ++trial) {
    RecordingSimulator sim;
    PlanDistribution plan = PlanDistribution::Zeros(3, 2, 0.5);
    // One step per primitive: seen[i] holds the K draws of primitive i.
    Refine(plan, sim, Vector::Zero(2), DistanceTo(rng.Uniform(-2, 2), rng.Uniform(-2, 2)),
           SmallRefine(3, 1, 20), rng);
    ASSERT_EQ(sim.seen.size(), 3u);
    for (int i = 0; i < 3; ++i) {
      for (int d = 0; d < 2; ++d) {
        EXPECT_GE(plan.means[i][d], sim.seen[i].col(d).minCoeff() - 1e-12);
        EXPECT_LE(plan.means[i][d], sim.seen[i].col(d).maxCoeff() + 1e-12);
      }
    }
    EXPECT_EQ(plan.stddev, 0.5);
  }
}

TEST(RefineTest, ConstantRewardAveragesTheSamples) {
  RecordingSimulator sim;
  PlanDistribution plan = PlanDistribution::Zeros(2, 2, 0.3);
  RngStream rng(6, 0);
  Refine(plan, sim, Vector::Zero(2), [](const Vector&) { return 0.0; }, SmallRefine(2, 1, 30), rng);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT((plan.means[i] - sim.seen[i].colwise().mean().transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(RefineTest, SamplesAreClippedAndEachPrimitiveHeldForHzSteps) {
  RecordingSimulator sim;
  PlanDistribution plan = PlanDistribution::Zeros(2, 2, 5.0);
  RngStream rng(7, 0);
  Refine(plan, sim, Vector::Zero(2), DistanceTo(1, 1), SmallRefine(2, 3, 40), rng);
  ASSERT_EQ(sim.seen.size(), 6u);
  for (const Matrix& m : sim.seen) EXPECT_LE(m.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_EQ(sim.seen[0], sim.seen[2]);
  EXPECT_EQ(sim.seen[3], sim.seen[5]);
}

TEST(RefineTest, NonFiniteSamplesExcludedAndAllExcludedFails) {
  RecordingSimulator sim;
  RngStream rng(8, 0);
  PlanDistribution plan = PlanDistribution::Zeros(1, 2, 0.3);
  // NaN whenever the sampled latent points left.
  const StateReward some_bad = [](const Vector& s) { return s[0] < 0 ? std::nan("") : s[0]; };
  const RefineResult r = Refine(plan, sim, Vector::Zero(2), some_bad, SmallRefine(1, 1, 50), rng);
  EXPECT_GT(r.excluded, 0);
  EXPECT_LT(r.excluded, 50);
  EXPECT_TRUE(plan.means[0].allFinite());
  const StateReward all_bad = [](const Vector&) { return std::nan(""); };
  EXPECT_THROW(Refine(plan, sim, Vector::Zero(2), all_bad, SmallRefine(1, 1, 50), rng), NumericFault);
}

TEST(RefineTest, ModelSimulationLeavesTheModelUntouched) {
  PointMass2D env;
  RngStream rng(9, 0);
  SkillDynamicsModel model(SkillDynamicsConfig::ForEnvironment(env.spec(), 2, {8}), rng);
  model.input_normalizer().SetStatistics(Vector::Zero(2), Vector::Ones(2));
  model.target_normalizer().SetStatistics(Vector::Zero(4), Vector::Ones(4));
  const SkillDynamicsModel before = model;
  ModelSimulator sim(model);
  PlanDistribution plan = PlanDistribution::Zeros(2, 2, 0.3);
  Refine(plan, sim, Vector::Zero(4), MakeGoalReward(env, {3.0, 3.0}, RewardMode::kDense),
         SmallRefine(2, 5, 20), rng);
  for (int l = 0; l < model.network().num_layers(); ++l) {
    EXPECT_EQ(model.network().weight(l).value, before.network().weight(l).value);
    EXPECT_EQ(model.network().bias(l).value, before.network().bias(l).value);
  }
}

TEST(RefineTest, SameStreamSameUpdate) {
  RecordingSimulator sim;
  PlanDistribution a = PlanDistribution::Zeros(2, 2, 0.3), b = a;
  RngStream ra(10, 0), rb(10, 0);
  Refine(a, sim, Vector::Zero(2), DistanceTo(1, -1), SmallRefine(2, 4, 30), ra);
  Refine(b, sim, Vector::Zero(2), DistanceTo(1, -1), SmallRefine(2, 4, 30), rb);
  EXPECT_EQ(a.means, b.means);
}

// Small plan std and a distant goal keep the mean travelling for all R
// steps; once converged the per-step best only reflects sampling noise.
TEST(RefineTest, BestRewardNonDecreasingUnderRepeatMostly) {
  int monotone = 0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    RngStream rng(11, trial);
    RecordingSimulator sim(1.0);
    const double angle = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    const Vector goal = 8.0 * Vector(Eigen::Vector2d(std::cos(angle), std::sin(angle)));
    const StateReward concave = [goal](const Vector& s) { return -(s - goal).squaredNorm(); };
    PlanDistribution plan = PlanDistribution::Zeros(1, 2, 0.05);
    const PlannerConfig cfg = SmallRefine(1, 10, 50);
    double previous = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int r = 0; r < cfg.refine_steps; ++r) {
      const double best = Refine(plan, sim, Vector::Zero(2), concave, cfg, rng).best_reward;
      if (best < previous) ok = false;
      previous = best;
    }
    monotone += ok;
  }
  EXPECT_GE(monotone, 0.8 * trials);
}

TEST(PlanDistributionTest, ShiftCopiesTheLastMean) {
  PlanDistribution plan = PlanDistribution::Zeros(3, 1, 0.3);
  plan.means = {Vector::Constant(1, 1.0), Vector::Constant(1, 2.0), Vector::Constant(1, 3.0)};
  plan.Shift();
  ASSERT_EQ(plan.length(), 3);
  EXPECT_EQ(plan.means[0][0], 2.0);
  EXPECT_EQ(plan.means[1][0], 3.0);
  EXPECT_EQ(plan.means[2][0], 3.0);
}

TEST(PlannerConfigTest, Defaults) {
  const PlannerConfig dense = PlannerConfig::Dense();
  EXPECT_EQ(dense.plan_length, 1);
  EXPECT_EQ(dense.hold_steps, 10);
  EXPECT_EQ(dense.refine_steps, 10);
  EXPECT_EQ(dense.samples, 50);
  EXPECT_EQ(dense.gamma, 10.0);
  EXPECT_EQ(dense.smooth_beta, 0.9);
  EXPECT_EQ(dense.episode_horizon, 200);
  const PlannerConfig sparse = PlannerConfig::Sparse();
  EXPECT_EQ(sparse.plan_length, 4);
  EXPECT_EQ(sparse.hold_steps, 25);
  EXPECT_EQ(sparse.samples, 200);
}

TEST(ExecuteEpisodeTest, TwentyRoundsOfTenSteps) {
  PointMass2D env;
  ActionPassThrough controller;
  // Exact point-mass integrator without noise.
  FunctionSimulator sim(2, [](const Vector& s, const Vector& a) {
    Vector n = s;
    n.tail(2) = (s.tail(2) + 0.1 * a).cwiseMax(-1.0).cwiseMin(1.0);
    n.head(2) += 0.1 * n.tail(2);
    return n;
  });
  RngStream rng(12, 0);
  PlannerConfig cfg = PlannerConfig::Dense();
  cfg.refine_steps = 2;
  const EpisodeResult r =
      ExecuteEpisode(controller, sim, env, MakeGoalReward(env, {3.0, -2.0}, RewardMode::kDense), cfg, rng);
  EXPECT_EQ(r.rounds, 20);
  EXPECT_EQ(r.trajectory.size(), 200);
  EXPECT_EQ(r.executed_latents.size(), 20u);
  const auto& last = r.trajectory.Positions(env).back();
  EXPECT_LT((last - Eigen::Vector2d(3.0, -2.0)).norm(), 1.0);
}

TEST(ExecuteEpisodeTest, PartialFinalRound) {
  PointMass2D env;
  ActionPassThrough controller;
  FunctionSimulator sim(2, [](const Vector& s, const Vector&) { return s; });
  RngStream rng(13, 0);
  PlannerConfig cfg = PlannerConfig::Dense();
  cfg.refine_steps = 1;
  cfg.hold_steps = 30;
  const EpisodeResult r =
      ExecuteEpisode(controller, sim, env, [](const Vector&) { return 0.0; }, cfg, rng);
  EXPECT_EQ(r.rounds, 7);
  EXPECT_EQ(r.trajectory.size(), 200);
  EXPECT_EQ(r.trajectory.transitions.back().step_index, 199);
}

TEST(ExecuteEpisodeTest, ZeroRewardStillRunsAFullEpisode) {
  PointMass2D env;
  ActionPassThrough controller;
  FunctionSimulator sim(2, [](const Vector& s, const Vector&) { return s; });
  RngStream rng(14, 0);
  const EpisodeResult r = ExecuteEpisode(controller, sim, env, [](const Vector&) { return 0.0; },
                                         PlannerConfig::Dense(), rng);
  EXPECT_EQ(r.trajectory.size(), 200);
  EXPECT_EQ(r.achieved_return, 0.0);
  for (const Vector& z : r.executed_latents) EXPECT_LE(z.cwiseAbs().maxCoeff(), 1.0);
}

}  // namespace
}  // namespace skillmpc
