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

// Independent reference computations shared by unit and acceptance tests.
// None of these call the library routine they are used to check.

#ifndef SKILLMPC_TESTS_ORACLES_H_
#define SKILLMPC_TESTS_ORACLES_H_

#include <cmath>
#include <vector>

#include "skillmpc/env.h"
#include "skillmpc/intrinsic.h"
#include "skillmpc/rng.h"
#include "skillmpc/skill_dynamics.h"
#include "skillmpc/skill_space.h"

namespace skillmpc::testing {

// log(q / ((1/L) sum_i q_i)) evaluated in linear space.
inline double NaiveDensityRatio(double log_q, const std::vector<double>& log_q_prior) {
  double mean = 0.0;
  for (double l : log_q_prior) mean += std::exp(l);
  mean /= static_cast<double>(log_q_prior.size());
  return std::log(std::exp(log_q) / mean);
}

// Discrete-skill reward by brute force: one LogProb call per (transition,
// skill) pair, densities summed in linear space.
inline double BruteForceDiscreteReward(const SkillDynamicsModel& model, const Transition& t,
                                       int num_skills) {
  const double q = std::exp(model.LogProb(t.state, t.skill, t.next_state));
  double sum = 0.0;
  for (int d = 0; d < num_skills; ++d) {
    sum += std::exp(model.LogProb(t.state, Vector::Unit(num_skills, d), t.next_state));
  }
  return std::log(q / (sum / num_skills));
}

// I(s'; z | s) = H(s' | s) - H(s' | s, z), both by explicit summation.
inline double EntropyDifferenceMi(const TabularSystem& sys) {
  double h_marginal = 0.0, h_conditional = 0.0;
  for (int s = 0; s < sys.num_states(); ++s) {
    const double ps = sys.state_distribution()[s];
    for (int n = 0; n < sys.num_states(); ++n) {
      double pm = 0.0;
      for (int z = 0; z < sys.num_skills(); ++z) {
        const double p = sys.transition(s, z, n);
        pm += sys.skill_prior()[z] * p;
        if (p > 0) h_conditional -= ps * sys.skill_prior()[z] * p * std::log(p);
      }
      if (pm > 0) h_marginal -= ps * pm * std::log(pm);
    }
  }
  return h_marginal - h_conditional;
}

// Random normalized conditional q(s' | s, z) in a system of the same shape.
inline TabularSystem RandomConditional(const TabularSystem& shape, RngStream& rng) {
  TabularSystem q(shape.num_states(), shape.num_skills());
  q.state_distribution() = shape.state_distribution();
  q.skill_prior() = shape.skill_prior();
  for (int s = 0; s < shape.num_states(); ++s) {
    for (int z = 0; z < shape.num_skills(); ++z) {
      double total = 0.0;
      std::vector<double> w(shape.num_states());
      for (double& x : w) total += (x = rng.Uniform(1e-3, 1.0));
      // Renormalize the last entry so the row sums to one to the last bit.
      double partial = 0.0;
      for (int n = 0; n + 1 < shape.num_states(); ++n) {
        q.transition(s, z, n) = w[n] / total;
        partial += q.transition(s, z, n);
      }
      q.transition(s, z, shape.num_states() - 1) = 1.0 - partial;
    }
  }
  return q;
}

// Small discrete-skill model on the point mass with non-trivial weights and
// normalizers fitted to random transitions.
inline SkillDynamicsModel RandomDiscreteModel(int num_skills, RngStream& rng,
                                              std::vector<Transition>* transitions) {
  PointMass2D env;
  SkillDynamicsModel model(SkillDynamicsConfig::ForEnvironment(env.spec(), num_skills, {16, 16}),
                           rng);
  for (int l = 0; l < model.network().num_layers(); ++l) {
    auto& b = model.network().bias(l).value;
    for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = rng.Normal(0.0, 0.5);
  }
  const SkillSpace space(SkillKind::kDiscrete, num_skills);
  transitions->clear();
  for (int i = 0; i < 64; ++i) {
    Transition t;
    t.state = Vector(4);
    for (int k = 0; k < 4; ++k) t.state[k] = rng.Normal(0.0, k < 2 ? 3.0 : 0.5);
    t.action = Vector::Zero(2);
    t.skill = space.Sample(rng).values;
    t.next_state = t.state;
    for (int k = 0; k < 4; ++k) t.next_state[k] += rng.Normal(0.0, 0.05);
    transitions->push_back(t);
  }
  model.UpdateNormalizers(DynamicsBatch::FromTransitions(*transitions));
  return model;
}

}  // namespace skillmpc::testing

#endif  // SKILLMPC_TESTS_ORACLES_H_
