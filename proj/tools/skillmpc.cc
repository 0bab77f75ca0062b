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

// skillmpc: train skills, plan with them, evaluate and export.
//
//   skillmpc train --config configs/pointmass.cfg --seed 7
//   skillmpc plan --checkpoint runs/default/final.ckpt --goal 5,5 --mode dense
//   skillmpc eval --checkpoint runs/default/final.ckpt --suite variance
//   skillmpc export-traces --checkpoint runs/default/final.ckpt
//   skillmpc baseline --config configs/pointmass.cfg --variant random

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skillmpc/checkpoint.h"
#include "skillmpc/config.h"
#include "skillmpc/error.h"
#include "skillmpc/report.h"
#include "skillmpc/run.h"

namespace {

using skillmpc::RunConfig;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string checkpoint;
  std::string output;
  std::vector<std::string> overrides;
};

void AddCommon(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "key = value config file");
  cmd->add_option("--seed", flags->seed, "Overrides the config seed");
  cmd->add_option("--output", flags->output, "Overrides output_dir");
  cmd->add_option("--set", flags->overrides, "Extra key=value overrides")
      ->allow_extra_args(false)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
}

// Config from (in increasing precedence) the checkpoint, the config file,
// --set overrides and --seed.
RunConfig ResolveConfig(const CommonFlags& flags, bool from_checkpoint) {
  RunConfig config;
  if (from_checkpoint && !flags.checkpoint.empty()) {
    config = skillmpc::ReadCheckpointConfig(flags.checkpoint);
  }
  if (!flags.config_path.empty()) config = skillmpc::LoadConfigFile(flags.config_path, config);
  for (const std::string& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw skillmpc::ConfigError("--set expects key=value, got '" + kv + "'");
    }
    skillmpc::SetConfigValue(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.output.empty()) config.output_dir = flags.output;
  skillmpc::ValidateConfig(config);
  return config;
}

void PrintConfig(const RunConfig& config) {
  std::cout << "# resolved config\n" << skillmpc::FormatConfig(config) << std::flush;
}

void PrintSummary(const skillmpc::Summary& summary) {
  for (const auto& [key, value] : summary) {
    std::cout << key << " = " << skillmpc::FormatNumber(value) << "\n";
  }
}

Eigen::Vector2d ParseGoal(const std::string& text) {
  double x = 0.0, y = 0.0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> x >> comma >> y) || comma != ',' || !in.eof()) {
    throw skillmpc::InvalidArgument("--goal expects x,y, got '" + text + "'");
  }
  return {x, y};
}

std::unique_ptr<skillmpc::DadsTrainer> RequireCheckpoint(const CommonFlags& flags) {
  if (flags.checkpoint.empty()) throw skillmpc::InvalidArgument("--checkpoint is required");
  return skillmpc::LoadCheckpoint(flags.checkpoint);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised skill discovery and zero-shot planning in skill space"};
  app.require_subcommand(1);

  CommonFlags train_flags, plan_flags, eval_flags, traces_flags, baseline_flags;
  std::string resume;
  CLI::App* train = app.add_subcommand("train", "Run skill discovery");
  AddCommon(train, &train_flags);
  train->add_option("--resume", resume, "Continue from this checkpoint");

  std::string goal_text, mode_text = "dense";
  CLI::App* plan = app.add_subcommand("plan", "Plan toward a goal (or the goal set) in skill space");
  AddCommon(plan, &plan_flags);
  plan->add_option("--checkpoint", plan_flags.checkpoint, "Trained checkpoint")->required();
  plan->add_option("--goal", goal_text, "Goal position x,y; omit to run the seeded goal set");
  plan->add_option("--mode", mode_text, "dense or sparse");

  std::string suite = "all";
  CLI::App* eval = app.add_subcommand("eval", "Run an evaluation suite");
  AddCommon(eval, &eval_flags);
  eval->add_option("--checkpoint", eval_flags.checkpoint, "Trained checkpoint")->required();
  eval->add_option("--suite", suite,
                   "variance, orientation, prediction, navigation, sparse or all");

  CLI::App* traces = app.add_subcommand("export-traces", "Write skill rollouts as CSV and SVG");
  AddCommon(traces, &traces_flags);
  traces->add_option("--checkpoint", traces_flags.checkpoint, "Trained checkpoint")->required();

  std::string variant_text = "random", baseline_mode = "dense";
  CLI::App* baseline = app.add_subcommand("baseline", "Model-based RL baseline on the goal set");
  AddCommon(baseline, &baseline_flags);
  baseline->add_option("--variant", variant_text, "random or strong_oracle");
  baseline->add_option("--mode", baseline_mode, "dense or sparse");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      RunConfig config = ResolveConfig(train_flags, false);
      if (!resume.empty()) {
        RunConfig stored = skillmpc::ReadCheckpointConfig(resume);
        stored.trainer.iterations = config.trainer.iterations;
        if (!train_flags.output.empty()) stored.output_dir = train_flags.output;
        config = stored;
      }
      PrintConfig(config);
      skillmpc::TrainOptions options;
      options.output_dir = skillmpc::ResolveOutputDir(config.output_dir);
      options.resume_checkpoint = resume;
      options.on_iteration = [](const skillmpc::IterationReport& r) {
        std::printf("iter %4d  reward %8.4f  dyn %8.4f -> %8.4f  critic %9.4f  policy %9.4f  %.2fs%s\n",
                    r.iteration, r.mean_intrinsic_reward, r.dynamics_loss_before,
                    r.dynamics_loss_after, r.critic_loss, r.policy_loss, r.wall_seconds,
                    r.failed ? "  (rolled back)" : "");
        std::fflush(stdout);
      };
      const skillmpc::TrainResult result = skillmpc::Train(config, options);
      std::cout << "final checkpoint: " << result.final_checkpoint << "\n"
                << "metrics: " << result.metrics_path << "\n"
                << "rollbacks = " << result.rollbacks << "\n";
    } else if (*plan) {
      const RunConfig config = ResolveConfig(plan_flags, true);
      PrintConfig(config);
      auto trainer = RequireCheckpoint(plan_flags);
      const std::string out = skillmpc::ResolveOutputDir(config.output_dir);
      const skillmpc::RewardMode mode = skillmpc::ParseRewardMode(mode_text);
      if (goal_text.empty()) {
        PrintSummary(skillmpc::RunEvalSuite(
            *trainer, config, mode == skillmpc::RewardMode::kSparse ? "sparse" : "navigation", out));
      } else {
        PrintSummary(skillmpc::RunPlan(*trainer, config, ParseGoal(goal_text), mode, out));
        std::cout << "trajectory: " << out << "/plan_trajectory.csv\n";
      }
    } else if (*eval) {
      const RunConfig config = ResolveConfig(eval_flags, true);
      PrintConfig(config);
      auto trainer = RequireCheckpoint(eval_flags);
      const std::string out = skillmpc::ResolveOutputDir(config.output_dir);
      PrintSummary(skillmpc::RunEvalSuite(*trainer, config, suite, out));
      if (suite == "variance") {
        std::ifstream table(out + "/variance.csv");
        std::cout << table.rdbuf();
      }
    } else if (*traces) {
      const RunConfig config = ResolveConfig(traces_flags, true);
      PrintConfig(config);
      auto trainer = RequireCheckpoint(traces_flags);
      const std::string out = skillmpc::ResolveOutputDir(config.output_dir);
      PrintSummary(skillmpc::ExportTraces(*trainer, config, out));
      std::cout << "traces: " << out << "/traces.csv\n";
    } else if (*baseline) {
      const RunConfig config = ResolveConfig(baseline_flags, false);
      PrintConfig(config);
      PrintSummary(skillmpc::RunBaseline(config, skillmpc::ParseBaselineVariant(variant_text),
                                         skillmpc::ParseRewardMode(baseline_mode),
                                         skillmpc::ResolveOutputDir(config.output_dir)));
    }
  } catch (const skillmpc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
