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

#include "skillmpc/intrinsic.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

double LogSumExp(std::span<const double> x, double extra, bool use_extra) {
  double m = use_extra ? extra : -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (std::isinf(m)) return m;
  double s = use_extra ? std::exp(extra - m) : 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

void CheckDistribution(const double* p, int n, const std::string& what) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(p[i] >= 0.0)) throw InvalidArgument(what + " has a negative entry");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidArgument(what + " sums to " + std::to_string(sum));
  }
}

}  // namespace

double IntrinsicRewardFromLogDensities(double log_q,
                                       std::span<const double> log_q_prior,
                                       bool include_current) {
  if (log_q_prior.empty()) {
    throw InvalidArgument("intrinsic reward needs L >= 1 prior samples");
  }
  const double count = static_cast<double>(log_q_prior.size()) +
                       (include_current ? 1.0 : 0.0);
  return log_q - LogSumExp(log_q_prior, log_q, include_current) + std::log(count);
}

std::vector<double> ComputeIntrinsicRewards(
    const SkillDynamicsModel& model, std::span<const Transition> transitions,
    const SkillSpace& space, const RewardConfig& config, RngStream& rng) {
  if (config.prior_samples < 1) {
    throw InvalidArgument("reward.L must be >= 1, got " +
                          std::to_string(config.prior_samples));
  }
  if (transitions.empty()) return {};
  const Matrix prior_skills =
      (space.discrete() && config.marginalize_discrete)
          ? space.EnumerateMatrix()
          : space.SampleMatrix(config.prior_samples, rng);

  const DynamicsBatch batch = DynamicsBatch::FromTransitions(transitions);
  const Vector log_q = model.LogProbBatch(batch);
  const Matrix log_q_prior =
      model.LogProbCross(batch.states, batch.next_states, prior_skills);

  std::vector<double> rewards(transitions.size());
  std::vector<double> row(prior_skills.rows());
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    for (Eigen::Index l = 0; l < prior_skills.rows(); ++l) row[l] = log_q_prior(i, l);
    rewards[i] = IntrinsicRewardFromLogDensities(log_q[i], row,
                                                 config.include_current_skill);
    if (!std::isfinite(rewards[i])) {
      throw NumericFault("non-finite intrinsic reward at transition " +
                         std::to_string(i));
    }
  }
  return rewards;
}

TabularSystem::TabularSystem(int num_states, int num_skills)
    : num_states_(num_states),
      num_skills_(num_skills),
      state_dist_(num_states, 0.0),
      skill_prior_(num_skills, 0.0),
      table_(static_cast<std::size_t>(num_states) * num_skills * num_states, 0.0) {
  if (num_states <= 0 || num_skills <= 0) {
    throw InvalidArgument("tabular system needs states and skills");
  }
}

double TabularSystem::Marginal(int s, int next) const {
  double p = 0.0;
  for (int z = 0; z < num_skills_; ++z) p += transition(s, z, next) * skill_prior_[z];
  return p;
}

void TabularSystem::Validate() const {
  CheckDistribution(state_dist_.data(), num_states_, "state distribution");
  CheckDistribution(skill_prior_.data(), num_skills_, "skill prior");
  for (int s = 0; s < num_states_; ++s) {
    for (int z = 0; z < num_skills_; ++z) {
      CheckDistribution(&table_[Index(s, z, 0)], num_states_,
                        "p(.|s=" + std::to_string(s) + ",z=" + std::to_string(z) + ")");
    }
  }
}

TabularSystem TabularSystem::Random(int num_states, int num_skills,
                                    RngStream& rng) {
  TabularSystem sys(num_states, num_skills);
  auto fill = [&rng](double* p, int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      p[i] = -std::log(1.0 - rng.Uniform()) + 1e-3;
      sum += p[i];
    }
    for (int i = 0; i < n; ++i) p[i] /= sum;
  };
  fill(sys.state_dist_.data(), num_states);
  fill(sys.skill_prior_.data(), num_skills);
  for (int s = 0; s < num_states; ++s) {
    for (int z = 0; z < num_skills; ++z) fill(&sys.table_[sys.Index(s, z, 0)], num_states);
  }
  return sys;
}

double ExactMutualInformation(const TabularSystem& system) {
  system.Validate();
  double mi = 0.0;
  for (int s = 0; s < system.num_states(); ++s) {
    const double ps = system.state_distribution()[s];
    if (ps == 0.0) continue;
    for (int z = 0; z < system.num_skills(); ++z) {
      const double pz = system.skill_prior()[z];
      if (pz == 0.0) continue;
      for (int n = 0; n < system.num_states(); ++n) {
        const double p = system.transition(s, z, n);
        if (p == 0.0) continue;
        mi += ps * pz * p * std::log(p / system.Marginal(s, n));
      }
    }
  }
  return mi;
}

double VariationalBound(const TabularSystem& system, const TabularSystem& q) {
  system.Validate();
  if (q.num_states() != system.num_states() || q.num_skills() != system.num_skills()) {
    throw DimensionError("q table shape differs from the system");
  }
  for (int s = 0; s < q.num_states(); ++s) {
    for (int z = 0; z < q.num_skills(); ++z) {
      double sum = 0.0;
      for (int n = 0; n < q.num_states(); ++n) {
        if (!(q.transition(s, z, n) >= 0.0)) throw InvalidArgument("q table has a negative entry");
        sum += q.transition(s, z, n);
      }
      if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("q table is not normalized");
    }
  }
  double bound = 0.0;
  for (int s = 0; s < system.num_states(); ++s) {
    const double ps = system.state_distribution()[s];
    if (ps == 0.0) continue;
    for (int z = 0; z < system.num_skills(); ++z) {
      const double pz = system.skill_prior()[z];
      if (pz == 0.0) continue;
      for (int n = 0; n < system.num_states(); ++n) {
        const double p = system.transition(s, z, n);
        if (p == 0.0) continue;
        bound += ps * pz * p *
                 (std::log(q.transition(s, z, n)) - std::log(system.Marginal(s, n)));
      }
    }
  }
  return bound;
}

}  // namespace skillmpc
