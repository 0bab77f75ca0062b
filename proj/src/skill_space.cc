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

#include "skillmpc/skill_space.h"

#include <cmath>

#include "skillmpc/error.h"

namespace skillmpc {

std::string ToString(SkillKind kind) {
  return kind == SkillKind::kDiscrete ? "discrete" : "continuous";
}

SkillKind ParseSkillKind(const std::string& name) {
  if (name == "discrete") return SkillKind::kDiscrete;
  if (name == "continuous") return SkillKind::kContinuous;
  throw InvalidArgument("unknown skill kind '" + name + "'");
}

SkillSpace::SkillSpace(SkillKind kind, int dim) : kind_(kind), dim_(dim) {
  if (dim <= 0) throw InvalidArgument("skill dimension must be positive");
}

Skill SkillSpace::Sample(RngStream& rng) const {
  Skill s{Vector::Zero(dim_), kind_};
  if (discrete()) {
    s.values[rng.UniformInt(dim_)] = 1.0;
  } else {
    // U[-1, 1) never returns -1 exactly in practice; reject it anyway to keep
    // samples in the open box.
    for (int i = 0; i < dim_; ++i) {
      double u;
      do {
        u = rng.Uniform(-1.0, 1.0);
      } while (u <= -1.0);
      s.values[i] = u;
    }
  }
  return s;
}

Matrix SkillSpace::SampleMatrix(int count, RngStream& rng) const {
  Matrix out(count, dim_);
  for (int k = 0; k < count; ++k) out.row(k) = Sample(rng).values.transpose();
  return out;
}

std::vector<Skill> SkillSpace::Enumerate() const {
  if (!discrete()) {
    throw UnsupportedOperation("cannot enumerate a continuous skill space");
  }
  std::vector<Skill> out;
  for (int i = 0; i < dim_; ++i) {
    Skill s{Vector::Zero(dim_), kind_};
    s.values[i] = 1.0;
    out.push_back(std::move(s));
  }
  return out;
}

Matrix SkillSpace::EnumerateMatrix() const {
  if (!discrete()) {
    throw UnsupportedOperation("cannot enumerate a continuous skill space");
  }
  return Matrix::Identity(dim_, dim_);
}

double SkillSpace::LogPriorDensity() const {
  return discrete() ? -std::log(static_cast<double>(dim_))
                    : -dim_ * std::log(2.0);
}

void SkillSpace::Validate(const Skill& skill) const {
  if (skill.dim() != dim_) {
    throw DimensionError("skill has dimension " + std::to_string(skill.dim()) +
                         ", space has " + std::to_string(dim_));
  }
  if (skill.kind != kind_) throw InvalidArgument("skill kind mismatch");
  if (discrete()) {
    int ones = 0;
    for (int i = 0; i < dim_; ++i) {
      if (skill.values[i] == 1.0) {
        ++ones;
      } else if (skill.values[i] != 0.0) {
        throw InvalidArgument("discrete skill is not one-hot");
      }
    }
    if (ones != 1) throw InvalidArgument("discrete skill is not one-hot");
  } else if ((skill.values.array().abs() > 1.0).any()) {
    throw InvalidArgument("continuous skill outside [-1, 1]^D");
  }
}

Vector SkillSpace::ClipToBox(const Vector& z) const {
  return z.cwiseMax(-1.0).cwiseMin(1.0);
}

Skill Interpolate(const Skill& a, const Skill& b, double t) {
  if (a.kind != SkillKind::kContinuous || b.kind != SkillKind::kContinuous) {
    throw UnsupportedOperation("interpolation needs continuous skills");
  }
  if (a.dim() != b.dim()) throw DimensionError("interpolating skills of different dimension");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("interpolation t outside [0, 1]");
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return Skill{(1.0 - t) * a.values + t * b.values, SkillKind::kContinuous};
}

}  // namespace skillmpc
