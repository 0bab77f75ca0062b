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

#include "skillmpc/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Bad(const std::string& key, const std::string& value,
                      const std::string& expected) {
  throw ConfigError("config key '" + key + "': expected " + expected +
                    ", got '" + value + "'");
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value,
              const char* expected) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) Bad(key, value, expected);
  return out;
}

int ParseInt(const std::string& k, const std::string& v) {
  return ParseNumber<int>(k, v, "an integer");
}
std::uint64_t ParseU64(const std::string& k, const std::string& v) {
  return ParseNumber<std::uint64_t>(k, v, "a non-negative integer");
}
double ParseDouble(const std::string& k, const std::string& v) {
  return ParseNumber<double>(k, v, "a number");
}
bool ParseBool(const std::string& k, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  Bad(k, v, "true or false");
}
std::vector<int> ParseIntList(const std::string& k, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const int x = ParseInt(k, Trim(item));
    if (x < 1) Bad(k, v, "a comma-separated list of positive integers");
    out.push_back(x);
  }
  if (out.empty()) Bad(k, v, "a comma-separated list of positive integers");
  return out;
}

std::string Str(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}
std::string Str(int x) { return std::to_string(x); }
std::string Str(std::uint64_t x) { return std::to_string(x); }
std::string Str(bool x) { return x ? "true" : "false"; }
std::string Str(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Entry {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SKILLMPC_FIELD(NAME, DESC, FIELD, PARSE)                                  \
  Entry {                                                                         \
    {NAME, DESC},                                                                 \
        [](RunConfig& c, const std::string& k, const std::string& v) {            \
          c.FIELD = PARSE(k, v);                                                  \
        },                                                                        \
        [](const RunConfig& c) { return Str(c.FIELD); }                           \
  }

// Keys shared by the dense and sparse planners.
#define SKILLMPC_PLANNER_SHARED(NAME, DESC, FIELD, PARSE)                         \
  Entry {                                                                         \
    {NAME, DESC},                                                                 \
        [](RunConfig& c, const std::string& k, const std::string& v) {            \
          c.planner.FIELD = c.sparse_planner.FIELD = PARSE(k, v);                 \
        },                                                                        \
        [](const RunConfig& c) { return Str(c.planner.FIELD); }                   \
  }

const std::vector<Entry>& Entries() {
  static const std::vector<Entry> entries = {
      Entry{{"env.name", "pointmass | unicycle"},
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v != "pointmass" && v != "unicycle") Bad(k, v, "pointmass or unicycle");
              c.env_name = v;
            },
            [](const RunConfig& c) { return c.env_name; }},
      SKILLMPC_FIELD("env.horizon", "episode length T", env.horizon, ParseInt),
      SKILLMPC_FIELD("env.dt", "integration step", env.dt, ParseDouble),
      SKILLMPC_FIELD("env.noise_std", "dynamics noise std", env.noise_std, ParseDouble),
      SKILLMPC_FIELD("env.reset_std", "reset jitter std", env.reset_std, ParseDouble),
      Entry{{"skill.kind", "continuous | discrete"},
            [](RunConfig& c, const std::string& k, const std::string& v) {
              try {
                c.skill_kind = ParseSkillKind(v);
              } catch (const Error&) {
                Bad(k, v, "continuous or discrete");
              }
            },
            [](const RunConfig& c) { return ToString(c.skill_kind); }},
      SKILLMPC_FIELD("skill.dim", "D: latent dimension or number of skills", skill_dim, ParseInt),
      SKILLMPC_FIELD("skill.resample_every", "0 = one skill per episode", trainer.resample_every, ParseInt),
      SKILLMPC_FIELD("dynamics.hidden_sizes", "skill-dynamics hidden layers", dynamics_hidden, ParseIntList),
      SKILLMPC_FIELD("dynamics.expert_count", "mixture experts", dynamics_experts, ParseInt),
      SKILLMPC_FIELD("dynamics.steps", "K1: fit steps per iteration", trainer.dynamics_steps, ParseInt),
      SKILLMPC_FIELD("dynamics.batch_size", "fit minibatch size", trainer.dynamics_batch, ParseInt),
      SKILLMPC_FIELD("optim.learning_rate", "Adam learning rate (all optimizers)", agent.learning_rate, ParseDouble),
      SKILLMPC_FIELD("agent.hidden_sizes", "policy and critic hidden layers", agent.hidden_sizes, ParseIntList),
      SKILLMPC_FIELD("agent.entropy_coeff", "fixed entropy coefficient", agent.entropy_coeff, ParseDouble),
      SKILLMPC_FIELD("agent.discount", "critic discount", agent.discount, ParseDouble),
      SKILLMPC_FIELD("agent.tau", "soft target coefficient", agent.tau, ParseDouble),
      SKILLMPC_FIELD("agent.updates_per_iter", "policy/critic updates per iteration", agent.updates_per_iter, ParseInt),
      SKILLMPC_FIELD("agent.batch_size", "policy/critic minibatch size", agent.batch_size, ParseInt),
      SKILLMPC_FIELD("agent.log_std_min", "policy log-std lower clamp", agent.log_std_min, ParseDouble),
      SKILLMPC_FIELD("agent.log_std_max", "policy log-std upper clamp", agent.log_std_max, ParseDouble),
      SKILLMPC_FIELD("trainer.transitions_per_iter", "M: steps collected per iteration", trainer.transitions_per_iter, ParseInt),
      SKILLMPC_FIELD("trainer.iterations", "skill-discovery iterations", trainer.iterations, ParseInt),
      SKILLMPC_FIELD("trainer.checkpoint_every", "0 = final checkpoint only", trainer.checkpoint_every, ParseInt),
      SKILLMPC_FIELD("trainer.eval_every", "0 = no periodic evaluation", trainer.eval_every, ParseInt),
      SKILLMPC_FIELD("reward.L", "prior samples in the reward denominator", reward.prior_samples, ParseInt),
      SKILLMPC_FIELD("reward.marginalize_discrete", "use all D skills for discrete spaces", reward.marginalize_discrete, ParseBool),
      SKILLMPC_FIELD("reward.include_current_skill", "add the current skill to the denominator", reward.include_current_skill, ParseBool),
      SKILLMPC_FIELD("planner.hp", "H_P for dense navigation", planner.plan_length, ParseInt),
      SKILLMPC_FIELD("planner.hz", "H_Z for dense navigation", planner.hold_steps, ParseInt),
      SKILLMPC_FIELD("planner.refine_steps", "R for dense navigation", planner.refine_steps, ParseInt),
      SKILLMPC_FIELD("planner.samples", "K for dense navigation", planner.samples, ParseInt),
      SKILLMPC_PLANNER_SHARED("planner.gamma", "MPPI temperature", gamma, ParseDouble),
      SKILLMPC_PLANNER_SHARED("planner.smooth_beta", "plan smoothing coefficient", smooth_beta, ParseDouble),
      SKILLMPC_PLANNER_SHARED("planner.plan_std", "fixed plan std per coordinate", plan_std, ParseDouble),
      SKILLMPC_PLANNER_SHARED("planner.clip_latents", "clip sampled latents to the prior box", clip_latents, ParseBool),
      SKILLMPC_PLANNER_SHARED("planner.horizon", "H_E: real steps per planned episode", episode_horizon, ParseInt),
      Entry{{"planner.execute_mode", "mean | sample"},
            [](RunConfig& c, const std::string& k, const std::string& v) {
              try {
                c.planner.execute_mode = c.sparse_planner.execute_mode = ParseExecuteMode(v);
              } catch (const Error&) {
                Bad(k, v, "mean or sample");
              }
            },
            [](const RunConfig& c) { return ToString(c.planner.execute_mode); }},
      SKILLMPC_FIELD("planner.sparse_hp", "H_P for sparse navigation", sparse_planner.plan_length, ParseInt),
      SKILLMPC_FIELD("planner.sparse_hz", "H_Z for sparse navigation", sparse_planner.hold_steps, ParseInt),
      SKILLMPC_FIELD("planner.sparse_refine_steps", "R for sparse navigation", sparse_planner.refine_steps, ParseInt),
      SKILLMPC_FIELD("planner.sparse_samples", "K for sparse navigation", sparse_planner.samples, ParseInt),
      SKILLMPC_FIELD("planner.sparse_epsilon", "sparse goal radius", sparse_epsilon, ParseDouble),
      SKILLMPC_FIELD("eval.num_goals", "goals per evaluation", goals.count, ParseInt),
      SKILLMPC_FIELD("eval.goal_box", "goals lie in [-box, box]^2", goals.box, ParseDouble),
      SKILLMPC_FIELD("eval.goal_min_norm", "minimum goal distance from the origin", goals.min_norm, ParseDouble),
      SKILLMPC_FIELD("eval.goal_seed", "seed of the shared goal set", goal_seed, ParseU64),
      SKILLMPC_FIELD("eval.episodes_per_skill", "episodes per skill for variance/error", eval_episodes_per_skill, ParseInt),
      SKILLMPC_FIELD("eval.variance_skills", "skills sampled for the variance table", eval_variance_skills, ParseInt),
      SKILLMPC_FIELD("eval.error_skills", "skills sampled for the prediction-error curve", eval_error_skills, ParseInt),
      SKILLMPC_FIELD("eval.grid", "orientation grid resolution", eval_grid, ParseInt),
      SKILLMPC_FIELD("eval.error_horizon", "open-loop prediction steps", eval_error_horizon, ParseInt),
      SKILLMPC_FIELD("eval.baseline_budget", "baseline env steps; 0 = training budget", baseline_budget, ParseInt),
      SKILLMPC_FIELD("seed", "master seed", seed, ParseU64),
      Entry{{"output_dir", "output directory (relative to the output root)"},
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v.empty()) Bad(k, v, "a path");
              c.output_dir = v;
            },
            [](const RunConfig& c) { return c.output_dir; }},
  };
  return entries;
}

#undef SKILLMPC_FIELD
#undef SKILLMPC_PLANNER_SHARED

const Entry& Find(const std::string& key) {
  for (const Entry& e : Entries()) {
    if (e.key.key == key) return e;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

std::unique_ptr<Environment> RunConfig::MakeEnv() const {
  return MakeEnvironment(env_name, env);
}

SkillSpace RunConfig::MakeSkillSpace() const { return SkillSpace(skill_kind, skill_dim); }

std::unique_ptr<DadsTrainer> MakeTrainer(const RunConfig& config) {
  ValidateConfig(config);
  return std::make_unique<DadsTrainer>(config.MakeEnv(), config.MakeSkillSpace(),
                                       config.trainer, config.agent, config.reward,
                                       config.dynamics_hidden,
                                       config.dynamics_experts, config.seed);
}

long RunConfig::TrainingBudget() const {
  return static_cast<long>(trainer.iterations) * trainer.transitions_per_iter;
}

const std::vector<ConfigKey>& ConfigKeys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const Entry& e : Entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void SetConfigValue(RunConfig& config, const std::string& key,
                    const std::string& value) {
  Find(key).set(config, key, value);
}

std::string GetConfigValue(const RunConfig& config, const std::string& key) {
  return Find(key).get(config);
}

RunConfig ParseConfig(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    SetConfigValue(base, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  ValidateConfig(base);
  return base;
}

RunConfig LoadConfigFile(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ParseConfig(ss.str(), std::move(base));
}

std::string FormatConfig(const RunConfig& config) {
  std::string out;
  for (const Entry& e : Entries()) out += e.key.key + " = " + e.get(config) + "\n";
  return out;
}

void ValidateConfig(const RunConfig& c) {
  auto require = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("config key '" + key + "': " + what);
  };
  require(c.env.horizon >= 1, "env.horizon", "must be >= 1");
  require(c.env.dt > 0.0, "env.dt", "must be > 0");
  require(c.env.noise_std >= 0.0, "env.noise_std", "must be >= 0");
  require(c.env.reset_std >= 0.0, "env.reset_std", "must be >= 0");
  require(c.skill_dim >= 1, "skill.dim", "must be >= 1");
  require(c.trainer.resample_every >= 0, "skill.resample_every", "must be >= 0");
  require(c.dynamics_experts >= 1, "dynamics.expert_count", "must be >= 1");
  require(c.trainer.dynamics_steps >= 0, "dynamics.steps", "must be >= 0");
  require(c.trainer.dynamics_batch >= 1, "dynamics.batch_size", "must be >= 1");
  require(c.agent.learning_rate > 0.0, "optim.learning_rate", "must be > 0");
  require(c.agent.entropy_coeff >= 0.0, "agent.entropy_coeff", "must be >= 0");
  require(c.agent.discount >= 0.0 && c.agent.discount < 1.0, "agent.discount", "must lie in [0, 1)");
  require(c.agent.tau > 0.0 && c.agent.tau <= 1.0, "agent.tau", "must lie in (0, 1]");
  require(c.agent.updates_per_iter >= 0, "agent.updates_per_iter", "must be >= 0");
  require(c.agent.batch_size >= 1, "agent.batch_size", "must be >= 1");
  require(c.agent.log_std_min < c.agent.log_std_max, "agent.log_std_min", "must be < agent.log_std_max");
  require(c.trainer.transitions_per_iter >= c.env.horizon, "trainer.transitions_per_iter",
          "must be >= env.horizon");
  require(c.trainer.iterations >= 0, "trainer.iterations", "must be >= 0");
  require(c.trainer.checkpoint_every >= 0, "trainer.checkpoint_every", "must be >= 0");
  require(c.trainer.eval_every >= 0, "trainer.eval_every", "must be >= 0");
  require(c.reward.prior_samples >= 1, "reward.L", "must be >= 1");
  require(c.sparse_epsilon > 0.0, "planner.sparse_epsilon", "must be > 0");
  require(c.goals.count >= 0, "eval.num_goals", "must be >= 0");
  require(c.goals.box > c.goals.min_norm && c.goals.min_norm >= 0.0, "eval.goal_box",
          "must exceed eval.goal_min_norm >= 0");
  require(c.eval_episodes_per_skill >= 2, "eval.episodes_per_skill", "must be >= 2");
  require(c.eval_variance_skills >= 1, "eval.variance_skills", "must be >= 1");
  require(c.eval_error_skills >= 1, "eval.error_skills", "must be >= 1");
  require(c.eval_grid >= 1, "eval.grid", "must be >= 1");
  require(c.eval_error_horizon >= 1 && c.eval_error_horizon <= c.env.horizon,
          "eval.error_horizon", "must lie in [1, env.horizon]");
  require(c.baseline_budget >= 0, "eval.baseline_budget", "must be >= 0");
  try {
    c.planner.Validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("planner.*: ") + e.what());
  }
  try {
    c.sparse_planner.Validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("planner.sparse_*: ") + e.what());
  }
}

}  // namespace skillmpc
