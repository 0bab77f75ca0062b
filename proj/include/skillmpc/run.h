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

// Drivers behind the command-line subcommands. Each writes its artifacts
// under an output directory and returns a summary for printing.

#ifndef SKILLMPC_RUN_H_
#define SKILLMPC_RUN_H_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "skillmpc/config.h"
#include "skillmpc/evalsuite.h"
#include "skillmpc/trainer.h"

namespace skillmpc {

// Environment variable that, when set, prefixes relative output paths.
inline constexpr const char* kOutputRootEnv = "SKILLMPC_OUTPUT_ROOT";

std::string ResolveOutputDir(const std::string& dir);

using Summary = std::vector<std::pair<std::string, double>>;

// metrics.csv column order. Wall-clock time is kept out of this file (it
// goes to timings.csv) so same-seed runs produce identical metrics.
const std::vector<std::string>& MetricsColumns();
std::vector<std::string> MetricsCells(const IterationReport& report);

struct TrainOptions {
  // Already resolved.
  std::string output_dir;
  // Resume from this checkpoint; only trainer.iterations is taken from the
  // config passed to Train, everything else comes from the checkpoint.
  std::string resume_checkpoint;
  std::function<void(const IterationReport&)> on_iteration;
};

struct TrainResult {
  std::string final_checkpoint;
  std::string metrics_path;
  std::vector<IterationReport> reports;
  int rollbacks = 0;
};

// Runs skill discovery to config.trainer.iterations. Writes
// checkpoints/iter_NNNNNN.ckpt (iteration 0 on a fresh start and every
// checkpoint_every iterations), final.ckpt, metrics.csv, timings.csv and,
// when eval_every > 0, eval.csv.
TrainResult Train(const RunConfig& config, const TrainOptions& options);

// Number of quadrants (of four) holding at least one displacement; points
// within 1e-6 of an axis count for neither side.
int QuadrantsCovered(const std::vector<Eigen::Vector2d>& points);

// Plans to one goal with the checkpointed skills and model. Writes
// plan_trajectory.csv and plots/plan.svg.
Summary RunPlan(const DadsTrainer& trainer, const RunConfig& config,
                const Eigen::Vector2d& goal, RewardMode mode,
                const std::string& output_dir);

// Suites: variance, orientation, prediction, navigation, sparse, all.
Summary RunEvalSuite(const DadsTrainer& trainer, const RunConfig& config,
                     const std::string& suite, const std::string& output_dir);

// Rolls the policy for `skills` (default: the 4 x 4 grid) and writes
// traces.csv plus plots/traces.svg.
Summary ExportTraces(const DadsTrainer& trainer, const RunConfig& config,
                     const std::string& output_dir,
                     std::vector<Vector> skills = {});

// Random-MBRL or strong-oracle MBRL on the shared goal set. Writes
// baseline_<variant>.csv.
Summary RunBaseline(const RunConfig& config, BaselineVariant variant,
                    RewardMode mode, const std::string& output_dir);

}  // namespace skillmpc

#endif  // SKILLMPC_RUN_H_
