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

#ifndef SKILLMPC_SKILL_DYNAMICS_H_
#define SKILLMPC_SKILL_DYNAMICS_H_

#include <span>
#include <vector>

#include "skillmpc/adam.h"
#include "skillmpc/autodiff.h"
#include "skillmpc/env.h"
#include "skillmpc/mlp.h"
#include "skillmpc/rng.h"

namespace skillmpc {

inline constexpr int kDefaultExpertCount = 4;

// Per-coordinate mean / standard deviation accumulator (Welford). After
// Freeze() the statistics are immutable until Reset().
class Normalizer {
 public:
  explicit Normalizer(int dim = 0, double min_std = 1e-4);

  int dim() const { return static_cast<int>(mean_.size()); }
  bool initialized() const { return count_ > 0; }
  bool frozen() const { return frozen_; }
  long count() const { return count_; }
  double min_std() const { return min_std_; }

  void Reset();
  // Rows are samples.
  void Accumulate(const Matrix& rows);
  void Freeze() { frozen_ = true; }

  // Installs explicit statistics; the normalizer becomes initialized and
  // frozen.
  void SetStatistics(const Vector& mean, const Vector& stddev);

  const Vector& mean() const { return mean_; }
  // Population standard deviation, floored at min_std.
  Vector stddev() const;
  // Sum of log stddev: the log-Jacobian of Denormalize.
  double LogScaleSum() const;

  Matrix Normalize(const Matrix& rows) const;
  Matrix Denormalize(const Matrix& rows) const;

  // Raw Welford state, for checkpoints.
  const Vector& m2() const { return m2_; }
  void Restore(long count, const Vector& mean, const Vector& m2,
               const Vector& explicit_std, bool frozen);
  const Vector& explicit_std() const { return explicit_std_; }

 private:
  double min_std_;
  long count_ = 0;
  Vector mean_;
  Vector m2_;
  // Non-empty when statistics were installed with SetStatistics.
  Vector explicit_std_;
  bool frozen_ = false;
};

struct SkillDynamicsConfig {
  int state_dim = 0;
  // Skill dimension, or action dimension for the action-conditioned variant.
  int conditioning_dim = 0;
  std::vector<int> input_indices;
  std::vector<int> predicted_indices;
  std::vector<int> hidden_sizes{64, 64};
  int expert_count = kDefaultExpertCount;
  double min_std = 1e-4;

  static SkillDynamicsConfig ForEnvironment(const EnvSpec& env,
                                            int conditioning_dim,
                                            std::vector<int> hidden_sizes,
                                            int expert_count = kDefaultExpertCount);
};

// Row-aligned batch of (s, z, s') samples.
struct DynamicsBatch {
  Matrix states;
  Matrix conditioning;
  Matrix next_states;

  int size() const { return static_cast<int>(states.rows()); }
  static DynamicsBatch FromTransitions(std::span<const Transition> transitions);
  // Same, with the actions as the conditioning input.
  static DynamicsBatch FromTransitionsWithActions(
      std::span<const Transition> transitions);
  DynamicsBatch Rows(std::span<const int> rows) const;
};

// q(s' | s, z): mixture of Gaussian experts over the normalized state delta
// of the predicted coordinates. Expert covariances are the identity in
// normalized space; only expert means and gating logits are learned.
//
// The network maps [normalized input coordinates, z] to E*P expert means
// followed by E gating logits.
class SkillDynamicsModel {
 public:
  SkillDynamicsModel() = default;
  SkillDynamicsModel(SkillDynamicsConfig config, RngStream& rng);

  const SkillDynamicsConfig& config() const { return config_; }
  int predicted_dim() const { return static_cast<int>(config_.predicted_indices.size()); }
  int expert_count() const { return config_.expert_count; }

  Mlp& network() { return network_; }
  const Mlp& network() const { return network_; }
  Normalizer& input_normalizer() { return input_normalizer_; }
  Normalizer& target_normalizer() { return target_normalizer_; }
  const Normalizer& input_normalizer() const { return input_normalizer_; }
  const Normalizer& target_normalizer() const { return target_normalizer_; }

  // Recomputes both normalizers from `batch` and freezes them.
  void UpdateNormalizers(const DynamicsBatch& batch);
  bool ready() const;

  // log q(s' | s, z) in raw delta units (includes -sum log sigma_target).
  double LogProb(const Vector& state, const Vector& z,
                 const Vector& next_state) const;
  Vector LogProbBatch(const DynamicsBatch& batch) const;
  // Entry (b, l) = log q(s'_b | s_b, z_l). Shares the skill half of the
  // first layer across the batch.
  Matrix LogProbCross(const Matrix& states, const Matrix& next_states,
                      const Matrix& skills) const;

  // Mean negative log-likelihood (raw units) over the batch.
  double MeanNegLogLikelihood(const DynamicsBatch& batch) const;
  // One Adam step on the mean negative log-likelihood; returns the pre-step
  // loss.
  double FitStep(const DynamicsBatch& batch, Adam& adam);

  // Expected next state: predicted coordinates advance by the de-normalized
  // gating-weighted mean delta. With `sample_rng` an expert and a Gaussian
  // delta are sampled instead.
  Vector PredictNext(const Vector& state, const Vector& z,
                     RngStream* sample_rng = nullptr) const;
  Matrix PredictNextBatch(const Matrix& states, const Matrix& z) const;

  // Gating weights (rows sum to one) for a batch.
  Matrix GatingWeights(const Matrix& states, const Matrix& z) const;

 private:
  void RequireReady(const char* where) const;
  Matrix NetworkInput(const Matrix& states, const Matrix& z) const;
  Matrix NormalizedTargets(const Matrix& states, const Matrix& next_states) const;
  // Log density of normalized targets under the mixture given raw network
  // outputs, one value per row.
  Vector MixtureLogDensity(const Matrix& outputs, const Matrix& targets) const;

  SkillDynamicsConfig config_;
  Mlp network_;
  Normalizer input_normalizer_;
  Normalizer target_normalizer_;
};

}  // namespace skillmpc

#endif  // SKILLMPC_SKILL_DYNAMICS_H_
