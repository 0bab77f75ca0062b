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

#ifndef SKILLMPC_CONFIG_H_
#define SKILLMPC_CONFIG_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "skillmpc/agent.h"
#include "skillmpc/env.h"
#include "skillmpc/evalsuite.h"
#include "skillmpc/intrinsic.h"
#include "skillmpc/planner.h"
#include "skillmpc/skill_space.h"
#include "skillmpc/trainer.h"

namespace skillmpc {

// Full experiment configuration. Every field has a key of the form
// block.name in the flat key=value file format; see ConfigKeys().
struct RunConfig {
  std::string env_name = "pointmass";
  EnvParams env;

  SkillKind skill_kind = SkillKind::kContinuous;
  int skill_dim = 2;

  std::vector<int> dynamics_hidden{64, 64};
  int dynamics_experts = kDefaultExpertCount;

  AgentConfig agent;
  TrainerConfig trainer;
  RewardConfig reward;

  // Dense-reward planner and the sparse-reward overrides.
  PlannerConfig planner = PlannerConfig::Dense();
  PlannerConfig sparse_planner = PlannerConfig::Sparse();
  double sparse_epsilon = kDefaultSparseEpsilon;

  GoalSetConfig goals;
  // Seed of the evaluation goal set, shared by every method.
  std::uint64_t goal_seed = 2026;
  int eval_episodes_per_skill = 5;
  int eval_variance_skills = 8;
  int eval_error_skills = 64;
  int eval_grid = 16;
  int eval_error_horizon = 50;
  // 0: use the skill-discovery step budget (iterations x M).
  int baseline_budget = 0;

  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";

  // Builds the configured environment.
  std::unique_ptr<Environment> MakeEnv() const;
  SkillSpace MakeSkillSpace() const;
  // Environment steps of skill discovery: iterations x M.
  long TrainingBudget() const;
};

struct ConfigKey {
  std::string key;
  std::string description;
};

// Every accepted key, in print order.
const std::vector<ConfigKey>& ConfigKeys();

// Applies one key=value pair. Unknown keys and malformed values throw
// ConfigError naming the key.
void SetConfigValue(RunConfig& config, const std::string& key,
                    const std::string& value);
std::string GetConfigValue(const RunConfig& config, const std::string& key);

// Parses the flat format: one key = value per line, '#' starts a comment,
// blank lines ignored. Keys are applied over `base`.
RunConfig ParseConfig(const std::string& text, RunConfig base = {});
RunConfig LoadConfigFile(const std::string& path, RunConfig base = {});

// Fully resolved key = value listing (round-trips through ParseConfig).
std::string FormatConfig(const RunConfig& config);

// Cross-field checks; throws ConfigError.
void ValidateConfig(const RunConfig& config);

// Fresh skill-discovery run for `config`, initialized from config.seed.
std::unique_ptr<DadsTrainer> MakeTrainer(const RunConfig& config);

}  // namespace skillmpc

#endif  // SKILLMPC_CONFIG_H_
