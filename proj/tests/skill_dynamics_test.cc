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
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "skillmpc/env.h"
#include "skillmpc/error.h"
#include "skillmpc/skill_dynamics.h"

namespace skillmpc {
namespace {

double NormalPdf(double x, double mean) {
  return std::exp(-0.5 * (x - mean) * (x - mean)) / std::sqrt(2 * std::numbers::pi);
}

// One state coordinate, predicted from itself, one conditioning input and a
// linear network whose weights are all zero, so the output is the bias.
SkillDynamicsModel ScalarModel(int experts, const Vector& bias) {
  SkillDynamicsConfig c;
  c.state_dim = 1;
  c.conditioning_dim = 1;
  c.input_indices = {0};
  c.predicted_indices = {0};
  c.hidden_sizes = {};
  c.expert_count = experts;
  RngStream rng(0, 0);
  SkillDynamicsModel model(c, rng);
  model.network().weight(0).value.setZero();
  model.network().bias(0).value = bias.transpose();
  model.input_normalizer().SetStatistics(Vector::Zero(1), Vector::Ones(1));
  model.target_normalizer().SetStatistics(Vector::Zero(1), Vector::Ones(1));
  return model;
}

Vector V(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(SkillDynamicsTest, DefaultExpertCount) {
  EXPECT_EQ(kDefaultExpertCount, 4);
  EXPECT_EQ(SkillDynamicsConfig().expert_count, 4);
}

TEST(SkillDynamicsTest, SingleExpertAtItsMean) {
  const SkillDynamicsModel model = ScalarModel(1, V({0.0, 0.0}));
  EXPECT_NEAR(model.LogProb(V({0.0}), V({0.0}), V({0.0})), -0.5 * std::log(2 * std::numbers::pi),
              1e-15);
  EXPECT_NEAR(model.LogProb(V({0.0}), V({0.0}), V({0.0})), -0.918939, 1e-6);
}

TEST(SkillDynamicsTest, EqualGatedMixtureMatchesExplicitSum) {
  // Means 0, 1, 2, 3 followed by equal gating logits.
  const SkillDynamicsModel model = ScalarModel(4, V({0, 1, 2, 3, 0, 0, 0, 0}));
  for (double target : {0.0, 0.7, -1.3, 2.5}) {
    double sum = 0.0;
    for (double m : {0.0, 1.0, 2.0, 3.0}) sum += 0.25 * NormalPdf(target, m);
    EXPECT_NEAR(model.LogProb(V({0.0}), V({0.0}), V({target})), std::log(sum), 1e-12);
  }
}

TEST(SkillDynamicsTest, UnequalGatingMatchesExplicitSum) {
  const SkillDynamicsModel model = ScalarModel(3, V({-1, 0.5, 2, 0.3, -1.2, 2.0}));
  const double logits[3] = {0.3, -1.2, 2.0};
  double z = 0.0;
  for (double l : logits) z += std::exp(l);
  const double means[3] = {-1, 0.5, 2};
  double sum = 0.0;
  for (int e = 0; e < 3; ++e) sum += std::exp(logits[e]) / z * NormalPdf(0.4, means[e]);
  EXPECT_NEAR(model.LogProb(V({0.0}), V({0.0}), V({0.4})), std::log(sum), 1e-12);
}

TEST(SkillDynamicsTest, DensityIntegratesToOne) {
  SkillDynamicsConfig c;
  c.state_dim = 1;
  c.conditioning_dim = 2;
  c.input_indices = {0};
  c.predicted_indices = {0};
  c.hidden_sizes = {8};
  RngStream rng(3, 0);
  SkillDynamicsModel model(c, rng);
  for (int l = 0; l < model.network().num_layers(); ++l) {
    auto& b = model.network().bias(l).value;
    for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = rng.Normal();
  }
  model.input_normalizer().SetStatistics(V({0.5}), V({2.0}));
  model.target_normalizer().SetStatistics(V({0.1}), V({0.3}));
  const Vector s = V({1.2}), z = V({0.4, -0.6});
  // Trapezoid rule over +-15 target standard deviations plus the mixture spread.
  const double lo = -8.0, hi = 8.0;
  const int n = 40000;
  const double h = (hi - lo) / n;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    integral += w * std::exp(model.LogProb(s, z, V({s[0] + lo + i * h})));
  }
  EXPECT_NEAR(integral * h, 1.0, 1e-3);
}

TEST(SkillDynamicsTest, TargetScaleChangesLogProbByTheJacobian) {
  SkillDynamicsModel model = ScalarModel(2, V({0.3, -0.4, 0.1, 0.2}));
  const double mean = 0.05, sd = 0.2, c = 3.7;
  model.target_normalizer().SetStatistics(V({mean}), V({sd}));
  const double delta = 0.11;
  const double before = model.LogProb(V({0.0}), V({0.0}), V({delta}));
  model.target_normalizer().SetStatistics(V({mean}), V({c * sd}));
  // Same normalized target under the rescaled normalizer.
  const double after = model.LogProb(V({0.0}), V({0.0}), V({mean + c * (delta - mean)}));
  EXPECT_NEAR(after - before, -std::log(c), 1e-12);
}

TEST(SkillDynamicsTest, GatingRowsSumToOne) {
  PointMass2D env;
  RngStream rng(4, 0);
  SkillDynamicsModel model(SkillDynamicsConfig::ForEnvironment(env.spec(), 2, {16, 16}), rng);
  model.input_normalizer().SetStatistics(Vector::Zero(2), Vector::Ones(2));
  model.target_normalizer().SetStatistics(Vector::Zero(4), Vector::Ones(4));
  Matrix s = Matrix::Random(20, 4) * 3.0, z = Matrix::Random(20, 2);
  const Matrix w = model.GatingWeights(s, z);
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    EXPECT_NEAR(w.row(r).sum(), 1.0, 1e-15);
    EXPECT_TRUE((w.row(r).array() >= 0).all());
  }
}

TEST(SkillDynamicsTest, UnfittedModelRejected) {
  PointMass2D env;
  RngStream rng(5, 0);
  SkillDynamicsModel model(SkillDynamicsConfig::ForEnvironment(env.spec(), 2, {8}), rng);
  EXPECT_FALSE(model.ready());
  EXPECT_THROW(model.LogProb(Vector::Zero(4), Vector::Zero(2), Vector::Zero(4)),
               UninitializedModel);
  EXPECT_THROW(model.PredictNext(Vector::Zero(4), Vector::Zero(2)), UninitializedModel);
}

TEST(SkillDynamicsTest, EmptyBatchRejected) {
  const SkillDynamicsModel fixed = ScalarModel(1, V({0.0, 0.0}));
  SkillDynamicsModel model = fixed;
  DynamicsBatch empty;
  empty.states.resize(0, 1);
  empty.conditioning.resize(0, 1);
  empty.next_states.resize(0, 1);
  Adam adam;
  EXPECT_THROW(model.FitStep(empty, adam), InvalidArgument);
}

// s' = s + A z with zero noise.
DynamicsBatch LinearSystemBatch(int n, RngStream& rng) {
  Matrix a(2, 2);
  a << 0.5, -0.2, 0.1, 0.3;
  DynamicsBatch b;
  b.states.resize(n, 2);
  b.conditioning.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    b.states.row(i) << rng.Uniform(-2, 2), rng.Uniform(-2, 2);
    b.conditioning.row(i) << rng.Uniform(-1, 1), rng.Uniform(-1, 1);
  }
  b.next_states = b.states + b.conditioning * a.transpose();
  return b;
}

SkillDynamicsConfig PlanarConfig(std::vector<int> hidden) {
  SkillDynamicsConfig c;
  c.state_dim = 2;
  c.conditioning_dim = 2;
  c.input_indices = {0, 1};
  c.predicted_indices = {0, 1};
  c.hidden_sizes = std::move(hidden);
  return c;
}

TEST(SkillDynamicsTest, HeldOutLikelihoodImprovesOnLinearSystem) {
  RngStream rng(6, 0);
  const DynamicsBatch train = LinearSystemBatch(2000, rng);
  const DynamicsBatch held_out = LinearSystemBatch(500, rng);
  SkillDynamicsModel model(PlanarConfig({64, 64}), rng);
  model.UpdateNormalizers(train);
  Adam adam;
  std::vector<double> ll{-model.MeanNegLogLikelihood(held_out)};
  std::vector<int> rows(128);
  for (int iter = 0; iter < 10; ++iter) {
    for (int k = 0; k < 32; ++k) {
      for (int& r : rows) r = rng.UniformInt(train.size());
      model.FitStep(train.Rows(rows), adam);
    }
    ll.push_back(-model.MeanNegLogLikelihood(held_out));
  }
  int decreases = 0;
  for (std::size_t i = 1; i < ll.size(); ++i) decreases += ll[i] < ll[i - 1];
  EXPECT_LE(decreases, 1);
  EXPECT_GT(ll.back(), ll.front());
}

TEST(SkillDynamicsTest, OverfitsIdenticalTransitions) {
  RngStream rng(7, 0);
  DynamicsBatch one = LinearSystemBatch(1, rng);
  DynamicsBatch batch;
  batch.states = one.states.replicate(32, 1);
  batch.conditioning = one.conditioning.replicate(32, 1);
  batch.next_states = one.next_states.replicate(32, 1);
  SkillDynamicsModel model(PlanarConfig({16}), rng);
  model.input_normalizer().SetStatistics(Vector::Zero(2), Vector::Ones(2));
  model.target_normalizer().SetStatistics(Vector::Zero(2), Vector::Ones(2));
  Adam adam;
  const double l0 = model.FitStep(batch, adam);
  const double l1 = model.FitStep(batch, adam);
  const double l2 = model.FitStep(batch, adam);
  EXPECT_LT(l1, l0);
  EXPECT_LT(l2, l1);
}

TEST(SkillDynamicsTest, ConstantDeltaSystemIsLearnedAndChainsLinearly) {
  RngStream rng(8, 0);
  const Vector c = V({0.05, -0.02});
  DynamicsBatch train;
  train.states = Matrix::Random(512, 2) * 2.0;
  train.conditioning = Matrix::Random(512, 2);
  train.next_states = train.states.rowwise() + c.transpose();
  SkillDynamicsModel model(PlanarConfig({32}), rng);
  model.UpdateNormalizers(train);
  // Deltas are constant: the target scale sits on its floor.
  const double floor = model.target_normalizer().min_std();
  EXPECT_EQ(model.target_normalizer().stddev(), Vector::Constant(2, floor));
  for (double lr : {1e-2, 1e-3, 1e-4}) {
    Adam adam(AdamOptions{lr});
    for (int step = 0; step < 1000; ++step) model.FitStep(train, adam);
  }

  RngStream eval(9, 0);
  const DynamicsBatch test = [&] {
    DynamicsBatch b;
    b.states = Matrix::Random(50, 2) * 2.0;
    b.conditioning = Matrix::Random(50, 2);
    b.next_states = b.states.rowwise() + c.transpose();
    return b;
  }();
  double one_step = 0.0;
  for (int i = 0; i < test.size(); ++i) {
    const Vector s = test.states.row(i).transpose(), z = test.conditioning.row(i).transpose();
    const double err = (model.PredictNext(s, z) - (s + c)).norm() / floor;
    EXPECT_LE(err, 1e-2);
    one_step = std::max(one_step, err);
    Vector chained = s;
    for (int h = 1; h <= 20; ++h) {
      chained = model.PredictNext(chained, z);
      const double chain_err = (chained - (s + h * c)).norm() / floor;
      // Linear growth in h, with slack for the state dependence of the error.
      EXPECT_LE(chain_err, 2.0 * h * 1e-2) << "h = " << h;
    }
  }
}

TEST(SkillDynamicsTest, UnpredictedCoordinatesUntouched) {
  SkillDynamicsConfig c;
  c.state_dim = 3;
  c.conditioning_dim = 1;
  c.input_indices = {0};
  c.predicted_indices = {1};
  c.hidden_sizes = {4};
  RngStream rng(10, 0);
  SkillDynamicsModel model(c, rng);
  model.input_normalizer().SetStatistics(V({0.0}), V({1.0}));
  model.target_normalizer().SetStatistics(V({0.3}), V({2.0}));
  const Vector s = V({1.5, -2.0, 7.25});
  const Vector next = model.PredictNext(s, V({0.5}));
  EXPECT_EQ(next[0], s[0]);
  EXPECT_EQ(next[2], s[2]);
  EXPECT_NE(next[1], s[1]);
}

TEST(SkillDynamicsTest, FrozenModelIsPure) {
  RngStream rng(11, 0);
  const DynamicsBatch data = LinearSystemBatch(100, rng);
  SkillDynamicsModel model(PlanarConfig({8}), rng);
  model.UpdateNormalizers(data);
  EXPECT_TRUE(model.input_normalizer().frozen());
  EXPECT_THROW(model.input_normalizer().Accumulate(data.states), InvalidArgument);
  const Vector a = model.LogProbBatch(data);
  const Matrix p = model.PredictNextBatch(data.states, data.conditioning);
  EXPECT_EQ(model.LogProbBatch(data), a);
  EXPECT_EQ(model.PredictNextBatch(data.states, data.conditioning), p);
}

TEST(SkillDynamicsTest, CrossDensitiesMatchPointwise) {
  RngStream rng(12, 0);
  const DynamicsBatch data = LinearSystemBatch(6, rng);
  SkillDynamicsModel model(PlanarConfig({8, 8}), rng);
  model.UpdateNormalizers(LinearSystemBatch(200, rng));
  const Matrix skills = Matrix::Random(5, 2);
  const Matrix cross = model.LogProbCross(data.states, data.next_states, skills);
  for (int b = 0; b < 6; ++b) {
    for (int l = 0; l < 5; ++l) {
      EXPECT_NEAR(cross(b, l),
                  model.LogProb(data.states.row(b).transpose(), skills.row(l).transpose(),
                                data.next_states.row(b).transpose()),
                  1e-12);
    }
  }
}

}  // namespace
}  // namespace skillmpc
