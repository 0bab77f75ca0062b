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

#ifndef SKILLMPC_INTRINSIC_H_
#define SKILLMPC_INTRINSIC_H_

#include <span>
#include <vector>

#include "skillmpc/env.h"
#include "skillmpc/rng.h"
#include "skillmpc/skill_dynamics.h"
#include "skillmpc/skill_space.h"

namespace skillmpc {

inline constexpr int kDefaultPriorSamples = 500;

struct RewardConfig {
  // L: prior samples in the denominator (continuous spaces).
  int prior_samples = kDefaultPriorSamples;
  // Discrete spaces: use all D skills instead of L samples.
  bool marginalize_discrete = true;
  // Adds the transition's own skill to the denominator, which caps rewards
  // at log(L + 1).
  bool include_current_skill = false;
};

// r = log q - log((1/L) sum_i q_i), evaluated as
// log q - logsumexp(log q_i) + log L. With include_current the current
// density joins the denominator and L becomes L + 1.
double IntrinsicRewardFromLogDensities(double log_q,
                                       std::span<const double> log_q_prior,
                                       bool include_current = false);

// Rewards for every transition, in order. One set of denominator skills is
// drawn per call and shared across the batch.
std::vector<double> ComputeIntrinsicRewards(
    const SkillDynamicsModel& model, std::span<const Transition> transitions,
    const SkillSpace& space, const RewardConfig& config, RngStream& rng);

// Finite system for checking the mutual-information bound exactly:
// p(s), p(z) (independent of s) and p(s' | s, z) over one state set.
class TabularSystem {
 public:
  TabularSystem(int num_states, int num_skills);

  int num_states() const { return num_states_; }
  int num_skills() const { return num_skills_; }

  std::vector<double>& state_distribution() { return state_dist_; }
  std::vector<double>& skill_prior() { return skill_prior_; }
  const std::vector<double>& state_distribution() const { return state_dist_; }
  const std::vector<double>& skill_prior() const { return skill_prior_; }

  double& transition(int s, int z, int next) {
    return table_[Index(s, z, next)];
  }
  double transition(int s, int z, int next) const {
    return table_[Index(s, z, next)];
  }

  // p(s' | s) = sum_z p(s' | s, z) p(z).
  double Marginal(int s, int next) const;

  // Throws InvalidArgument unless every distribution sums to 1 (+-1e-12)
  // and has no negative entries.
  void Validate() const;

  // Random system with strictly positive entries.
  static TabularSystem Random(int num_states, int num_skills, RngStream& rng);

 private:
  std::size_t Index(int s, int z, int next) const {
    return (static_cast<std::size_t>(s) * num_skills_ + z) * num_states_ + next;
  }

  int num_states_;
  int num_skills_;
  std::vector<double> state_dist_;
  std::vector<double> skill_prior_;
  std::vector<double> table_;
};

// Exact I(s'; z | s) by explicit summation.
double ExactMutualInformation(const TabularSystem& system);

// E_p[log q(s'|s,z) - log p(s'|s)] for a normalized conditional q stored in
// the transition table of `q` (only its transitions are read).
double VariationalBound(const TabularSystem& system, const TabularSystem& q);

}  // namespace skillmpc

#endif  // SKILLMPC_INTRINSIC_H_
