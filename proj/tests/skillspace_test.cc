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
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "skillmpc/error.h"
#include "skillmpc/skill_space.h"

namespace skillmpc {
namespace {

Skill Continuous(double a, double b) {
  Vector v(2);
  v << a, b;
  return {v, SkillKind::kContinuous};
}

TEST(SkillSpaceTest, DiscretePriorIsUniform) {
  const SkillSpace space(SkillKind::kDiscrete, 20);
  RngStream rng(1, 0);
  const int n = 100000;
  std::vector<int> counts(20, 0);
  for (int i = 0; i < n; ++i) {
    const Skill z = space.Sample(rng);
    ASSERT_DOUBLE_EQ(z.values.sum(), 1.0);
    int idx;
    z.values.maxCoeff(&idx);
    ++counts[idx];
  }
  double chi2 = 0.0;
  const double expected = n / 20.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 99th percentile of chi-square with 19 degrees of freedom.
  EXPECT_LT(chi2, 36.19);
}

TEST(SkillSpaceTest, ContinuousPriorInsideBoxWithZeroMean) {
  const SkillSpace space(SkillKind::kContinuous, 2);
  RngStream rng(2, 0);
  const int n = 100000;
  Vector sum = Vector::Zero(2);
  for (int i = 0; i < n; ++i) {
    const Skill z = space.Sample(rng);
    ASSERT_TRUE((z.values.array() > -1.0).all() && (z.values.array() < 1.0).all());
    sum += z.values;
  }
  // Uniform(-1, 1) has std 1/sqrt(3); 3 sigma of the sample mean.
  const double bound = 3.0 / std::sqrt(3.0) / std::sqrt(static_cast<double>(n));
  EXPECT_LT(std::abs(sum[0] / n), bound);
  EXPECT_LT(std::abs(sum[1] / n), bound);
}

TEST(SkillSpaceTest, SingleDiscreteSkill) {
  const SkillSpace space(SkillKind::kDiscrete, 1);
  RngStream rng(3, 0);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(space.Sample(rng).values, Vector::Ones(1));
  ASSERT_EQ(space.Enumerate().size(), 1u);
  EXPECT_EQ(space.Enumerate()[0].values, Vector::Ones(1));
}

TEST(SkillSpaceTest, EnumerateTwo) {
  const auto skills = SkillSpace(SkillKind::kDiscrete, 2).Enumerate();
  ASSERT_EQ(skills.size(), 2u);
  EXPECT_EQ(skills[0].values, (Vector(2) << 1, 0).finished());
  EXPECT_EQ(skills[1].values, (Vector(2) << 0, 1).finished());
}

TEST(SkillSpaceTest, EnumerateTwentyDistinctAndComplete) {
  const auto skills = SkillSpace(SkillKind::kDiscrete, 20).Enumerate();
  ASSERT_EQ(skills.size(), 20u);
  std::set<std::vector<double>> seen;
  Vector total = Vector::Zero(20);
  for (const Skill& z : skills) {
    seen.insert(std::vector<double>(z.values.data(), z.values.data() + 20));
    total += z.values;
  }
  EXPECT_EQ(seen.size(), 20u);
  EXPECT_EQ(total, Vector::Ones(20));
}

TEST(SkillSpaceTest, EnumerateContinuousUnsupported) {
  EXPECT_THROW(SkillSpace(SkillKind::kContinuous, 2).Enumerate(), UnsupportedOperation);
}

TEST(SkillSpaceTest, InterpolateEndpointsAndMidpoint) {
  const Skill a = Continuous(1.0, 1.0), b = Continuous(-1.0, 1.0);
  EXPECT_EQ(Interpolate(a, b, 0.0).values, a.values);
  EXPECT_EQ(Interpolate(a, b, 0.5).values, (Vector(2) << 0.0, 1.0).finished());
  for (double t : {0.0, 0.3, 0.77, 1.0}) EXPECT_EQ(Interpolate(a, a, t).values, a.values);
}

TEST(SkillSpaceTest, InterpolateDiscreteUnsupported) {
  const auto skills = SkillSpace(SkillKind::kDiscrete, 2).Enumerate();
  EXPECT_THROW(Interpolate(skills[0], skills[1], 0.5), UnsupportedOperation);
}

TEST(SkillSpaceTest, InterpolationStaysInClosedBox) {
  RngStream rng(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const Skill a = Continuous(rng.Uniform(-1, 1), rng.Uniform(-1, 1));
    const Skill b = Continuous(rng.Uniform(-1, 1), rng.Uniform(-1, 1));
    const Vector z = Interpolate(a, b, rng.Uniform()).values;
    EXPECT_TRUE((z.array().abs() <= 1.0).all());
  }
}

TEST(SkillSpaceTest, SamplingDependsOnlyOnTheStream) {
  const SkillSpace space(SkillKind::kContinuous, 3);
  RngStream a(9, 1), b(9, 1);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(space.Sample(a).values, space.Sample(b).values);
}

TEST(SkillSpaceTest, ValidateRejectsForeignSkills) {
  const SkillSpace space(SkillKind::kContinuous, 2);
  EXPECT_THROW(space.Validate(Continuous(1.5, 0.0)), InvalidArgument);
  EXPECT_THROW(space.Validate({Vector::Zero(3), SkillKind::kContinuous}), DimensionError);
  EXPECT_NO_THROW(space.Validate(Continuous(0.2, -0.9)));
}

TEST(SkillSpaceTest, LogPriorDensity) {
  EXPECT_DOUBLE_EQ(SkillSpace(SkillKind::kDiscrete, 20).LogPriorDensity(), -std::log(20.0));
  EXPECT_DOUBLE_EQ(SkillSpace(SkillKind::kContinuous, 2).LogPriorDensity(), -2 * std::log(2.0));
}

}  // namespace
}  // namespace skillmpc
