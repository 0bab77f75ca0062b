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

#ifndef SKILLMPC_SKILL_SPACE_H_
#define SKILLMPC_SKILL_SPACE_H_

#include <string>
#include <vector>

#include "skillmpc/autodiff.h"
#include "skillmpc/rng.h"

namespace skillmpc {

enum class SkillKind { kDiscrete, kContinuous };

std::string ToString(SkillKind kind);
SkillKind ParseSkillKind(const std::string& name);

// A latent primitive: a one-hot vector (discrete prior) or a point of the
// box (-1, 1)^D (continuous prior).
struct Skill {
  Vector values;
  SkillKind kind = SkillKind::kContinuous;

  int dim() const { return static_cast<int>(values.size()); }
};

// Uniform skill prior p(z). `dim` is the number of skills for a discrete
// space and the latent dimension for a continuous one.
class SkillSpace {
 public:
  SkillSpace(SkillKind kind, int dim);

  SkillKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool discrete() const { return kind_ == SkillKind::kDiscrete; }

  Skill Sample(RngStream& rng) const;
  // `count` prior samples as rows.
  Matrix SampleMatrix(int count, RngStream& rng) const;
  // All D one-hot skills in index order. Discrete spaces only.
  std::vector<Skill> Enumerate() const;
  // D x D identity, the rows of which are the enumerated skills.
  Matrix EnumerateMatrix() const;

  // Log prior density: -log D (discrete) or -D log 2 (continuous box).
  double LogPriorDensity() const;

  // Throws DimensionError / InvalidArgument if `skill` does not belong here.
  void Validate(const Skill& skill) const;

  // Clamps a continuous latent to the closed box [-1, 1]^D.
  Vector ClipToBox(const Vector& z) const;

 private:
  SkillKind kind_;
  int dim_;
};

// (1 - t) * a + t * b. Continuous skills only; t in [0, 1].
Skill Interpolate(const Skill& a, const Skill& b, double t);

}  // namespace skillmpc

#endif  // SKILLMPC_SKILL_SPACE_H_
