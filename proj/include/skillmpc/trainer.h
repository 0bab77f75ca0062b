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

#ifndef SKILLMPC_TRAINER_H_
#define SKILLMPC_TRAINER_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "skillmpc/adam.h"
#include "skillmpc/agent.h"
#include "skillmpc/env.h"
#include "skillmpc/intrinsic.h"
#include "skillmpc/rng.h"
#include "skillmpc/skill_dynamics.h"
#include "skillmpc/skill_space.h"

namespace skillmpc {

struct TrainerConfig {
  // M: on-policy transitions collected per iteration (whole episodes).
  int transitions_per_iter = 2000;
  // K1: dynamics gradient steps per iteration, and their minibatch size.
  int dynamics_steps = 32;
  int dynamics_batch = 128;
  int iterations = 250;
  // 0 disables periodic checkpoints (the final one is always written).
  int checkpoint_every = 50;
  // 0 disables the periodic evaluation record.
  int eval_every = 0;
  // 0 keeps one skill per episode; N > 0 redraws the skill every N steps.
  int resample_every = 0;
};

struct IterationReport {
  int iteration = 0;
  double mean_intrinsic_reward = 0.0;
  double dynamics_loss_before = 0.0;
  double dynamics_loss_after = 0.0;
  double critic_loss = 0.0;
  double policy_loss = 0.0;
  int episodes = 0;
  int transitions = 0;
  // Set when a numeric fault forced a rollback to the previous parameters.
  bool failed = false;
  std::string failure;
  double wall_seconds = 0.0;
};

// Collects whole episodes until at least `min_transitions` exist. Each
// episode draws a fresh skill (or redraws every `resample_every` steps).
// Episode ids start at `first_episode_id`.
std::vector<Transition> CollectRollouts(const SkillController& controller,
                                        Environment& env,
                                        const SkillSpace& space,
                                        int min_transitions, RngStream& rng,
                                        int first_episode_id = 0,
                                        int resample_every = 0);

// Rolls one episode of the environment's horizon with a fixed skill.
Trajectory RollOut(const SkillController& controller, Environment& env,
                   const Vector& skill, RngStream& rng, int episode_id = 0);

// Independent RNG streams owned by a training run.
struct TrainerStreams {
  RngStream collect;
  RngStream fit;
  RngStream reward;
  RngStream update;

  explicit TrainerStreams(std::uint64_t seed = 0)
      : collect(seed, 1), fit(seed, 2), reward(seed, 3), update(seed, 4) {}
};

// Everything that evolves during skill discovery. Copyable so an iteration
// can be rolled back.
struct DadsState {
  SkillDynamicsModel dynamics;
  Adam dynamics_optimizer;
  Agent agent;
  TrainerStreams streams;
  // Completed iterations.
  int iteration = 0;
  int episodes_seen = 0;
};

// Skill discovery on one environment and skill space.
class DadsTrainer {
 public:
  DadsTrainer(std::unique_ptr<Environment> env, SkillSpace space,
              TrainerConfig trainer, AgentConfig agent, RewardConfig reward,
              std::vector<int> dynamics_hidden, int expert_count,
              std::uint64_t seed);

  // One pass of: collect, update normalizers, K1 fit steps, freeze, compute
  // intrinsic rewards, policy/critic updates. A numeric fault restores the
  // previous parameters and marks the report failed.
  IterationReport RunIteration();

  const Environment& env() const { return *env_; }
  Environment& env() { return *env_; }
  const SkillSpace& space() const { return space_; }
  const TrainerConfig& trainer_config() const { return trainer_; }
  const RewardConfig& reward_config() const { return reward_; }
  DadsState& state() { return state_; }
  const DadsState& state() const { return state_; }

  // Rewards of the most recent successful iteration, aligned with
  // last_transitions().
  const std::vector<Transition>& last_transitions() const { return last_; }

 private:
  void FitDynamics(const DynamicsBatch& batch, IterationReport* report);
  void UpdateAgent(IterationReport* report);

  std::unique_ptr<Environment> env_;
  SkillSpace space_;
  TrainerConfig trainer_;
  RewardConfig reward_;
  DadsState state_;
  std::vector<Transition> last_;
};

// Observation-space batches for the agent update.
AgentBatch MakeAgentBatch(const Environment& env,
                          const std::vector<Transition>& transitions,
                          std::span<const int> rows);

}  // namespace skillmpc

#endif  // SKILLMPC_TRAINER_H_
