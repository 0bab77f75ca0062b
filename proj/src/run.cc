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

#include "skillmpc/run.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skillmpc/checkpoint.h"
#include "skillmpc/error.h"
#include "skillmpc/report.h"

namespace skillmpc {

namespace {

namespace fs = std::filesystem;

// Stream ids for evaluation randomness; disjoint from the training streams.
constexpr std::uint64_t kEvalStreamBase = 100;

std::string Join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string CheckpointName(int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "iter_%06d.ckpt", iteration);
  return buf;
}

// Rows of an existing metrics file up to and including `iteration`.
std::vector<std::string> KeptMetricsRows(const std::string& path, int iteration) {
  std::vector<std::string> rows;
  std::ifstream f(path);
  if (!f) return rows;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const int it = std::atoi(line.substr(0, line.find(',')).c_str());
    if (it <= iteration) rows.push_back(line);
  }
  return rows;
}

std::string Lines(const std::string& header, const std::vector<std::string>& rows) {
  std::string out = header + "\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

std::string JoinCells(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s;
}

std::vector<Vector> PriorSkills(const RunConfig& config, int count, std::uint64_t stream) {
  RngStream rng(config.seed, stream);
  const SkillSpace space = config.MakeSkillSpace();
  std::vector<Vector> skills;
  for (int i = 0; i < count; ++i) skills.push_back(space.Sample(rng).values);
  return skills;
}

void RequireContinuous2D(const RunConfig& config, const char* what) {
  if (config.skill_kind != SkillKind::kContinuous || config.skill_dim != 2) {
    throw UnsupportedOperation(std::string(what) + " needs a 2D continuous skill space");
  }
}

Series TraceSeries(const Trajectory& traj, const Environment& env, const std::string& label) {
  Series s;
  s.label = label;
  if (!traj.transitions.empty()) {
    const auto p0 = env.Position(traj.transitions.front().state);
    s.x.push_back(p0.x());
    s.y.push_back(p0.y());
  }
  for (const auto& p : traj.Positions(env)) {
    s.x.push_back(p.x());
    s.y.push_back(p.y());
  }
  return s;
}

// Evaluation written to eval.csv during training.
std::vector<double> QuickEval(const DadsTrainer& trainer, const RunConfig& config, int iteration) {
  auto env = config.MakeEnv();
  RngStream rng(config.seed, kEvalStreamBase + 1000 + static_cast<std::uint64_t>(iteration));
  PolicyController controller(trainer.state().agent.policy(), true);
  if (config.skill_kind == SkillKind::kContinuous && config.skill_dim == 2) {
    const OrientationMap map = ComputeOrientationMap(controller, *env, 4, rng);
    double disp = 0.0;
    for (const auto& d : map.displacements) disp += d.norm();
    return {static_cast<double>(iteration), static_cast<double>(QuadrantsCovered(map.displacements)),
            disp / map.displacements.size(), OrientationSmoothness(map)};
  }
  std::vector<Eigen::Vector2d> finals;
  double disp = 0.0;
  for (const Vector& z : PriorSkills(config, 16, kEvalStreamBase + 2)) {
    const Trajectory t = RollOut(controller, *env, z, rng);
    finals.push_back(env->Position(t.transitions.back().next_state) -
                     env->Position(t.transitions.front().state));
    disp += finals.back().norm();
  }
  return {static_cast<double>(iteration), static_cast<double>(QuadrantsCovered(finals)),
          disp / finals.size(), std::nan("")};
}

}  // namespace

std::string ResolveOutputDir(const std::string& dir) {
  const char* root = std::getenv(kOutputRootEnv);
  if (root == nullptr || *root == '\0' || fs::path(dir).is_absolute()) return dir;
  return (fs::path(root) / dir).string();
}

const std::vector<std::string>& MetricsColumns() {
  static const std::vector<std::string> cols{
      "iteration",   "mean_intrinsic_reward", "dynamics_loss_before", "dynamics_loss_after",
      "critic_loss", "policy_loss",           "episodes",             "transitions",
      "failed"};
  return cols;
}

std::vector<std::string> MetricsCells(const IterationReport& r) {
  return {std::to_string(r.iteration),    FormatNumber(r.mean_intrinsic_reward),
          FormatNumber(r.dynamics_loss_before), FormatNumber(r.dynamics_loss_after),
          FormatNumber(r.critic_loss),    FormatNumber(r.policy_loss),
          std::to_string(r.episodes),     std::to_string(r.transitions),
          r.failed ? "1" : "0"};
}

TrainResult Train(const RunConfig& config, const TrainOptions& options) {
  ValidateConfig(config);
  const std::string& dir = options.output_dir;
  const std::string ckpt_dir = Join(dir, "checkpoints");
  TrainResult result;
  result.metrics_path = Join(dir, "metrics.csv");
  const std::string timings_path = Join(dir, "timings.csv");
  const std::string eval_path = Join(dir, "eval.csv");

  std::unique_ptr<DadsTrainer> trainer;
  RunConfig effective = config;
  std::vector<std::string> metric_rows, timing_rows, eval_rows;
  if (options.resume_checkpoint.empty()) {
    trainer = MakeTrainer(config);
    SaveCheckpoint(Join(ckpt_dir, CheckpointName(0)), effective, trainer->state());
  } else {
    trainer = LoadCheckpoint(options.resume_checkpoint);
    effective = ReadCheckpointConfig(options.resume_checkpoint);
    effective.trainer.iterations = config.trainer.iterations;
    const int start = trainer->state().iteration;
    metric_rows = KeptMetricsRows(result.metrics_path, start);
    timing_rows = KeptMetricsRows(timings_path, start);
    eval_rows = KeptMetricsRows(eval_path, start);
  }
  const std::string metrics_header = JoinCells(MetricsColumns());
  const std::string timings_header = "iteration,wall_seconds";
  const std::string eval_header = "iteration,quadrants_covered,mean_displacement,orientation_smoothness_deg";
  WriteFileAtomic(result.metrics_path, Lines(metrics_header, metric_rows));

  const TrainerConfig& tc = effective.trainer;
  while (trainer->state().iteration < tc.iterations) {
    const IterationReport report = trainer->RunIteration();
    if (report.failed) ++result.rollbacks;
    metric_rows.push_back(JoinCells(MetricsCells(report)));
    timing_rows.push_back(std::to_string(report.iteration) + "," + FormatNumber(report.wall_seconds));
    try {
      WriteFileAtomic(result.metrics_path, Lines(metrics_header, metric_rows));
      WriteFileAtomic(timings_path, Lines(timings_header, timing_rows));
      if (tc.eval_every > 0 && report.iteration % tc.eval_every == 0) {
        std::vector<std::string> cells;
        for (double v : QuickEval(*trainer, effective, report.iteration)) cells.push_back(FormatNumber(v));
        eval_rows.push_back(JoinCells(cells));
        WriteFileAtomic(eval_path, Lines(eval_header, eval_rows));
      }
      if (tc.checkpoint_every > 0 && report.iteration % tc.checkpoint_every == 0) {
        SaveCheckpoint(Join(ckpt_dir, CheckpointName(report.iteration)), effective, trainer->state());
      }
    } catch (const Error& e) {
      throw Error("iteration " + std::to_string(report.iteration) + ": " + e.what());
    }
    if (options.on_iteration) options.on_iteration(report);
    result.reports.push_back(report);
  }
  result.final_checkpoint = Join(dir, "final.ckpt");
  SaveCheckpoint(result.final_checkpoint, effective, trainer->state());
  return result;
}

int QuadrantsCovered(const std::vector<Eigen::Vector2d>& points) {
  bool q[4] = {false, false, false, false};
  for (const auto& p : points) {
    if (std::abs(p.x()) < 1e-6 || std::abs(p.y()) < 1e-6) continue;
    q[(p.x() > 0 ? 0 : 1) + (p.y() > 0 ? 0 : 2)] = true;
  }
  return q[0] + q[1] + q[2] + q[3];
}

Summary RunPlan(const DadsTrainer& trainer, const RunConfig& config,
                const Eigen::Vector2d& goal, RewardMode mode,
                const std::string& output_dir) {
  auto env = config.MakeEnv();
  RngStream rng(config.seed, kEvalStreamBase + 3);
  PolicyController controller(trainer.state().agent.policy(), true);
  ModelSimulator simulator(trainer.state().dynamics);
  const bool sparse = mode == RewardMode::kSparse;
  const PlannerConfig& pc = sparse ? config.sparse_planner : config.planner;
  const NavigationReport nav = EvaluateNavigation(controller, simulator, *env, {goal}, mode,
                                                  config.sparse_epsilon, pc, rng);
  const GoalResult& r = nav.goals.front();
  std::vector<std::vector<double>> rewards(1);
  for (const auto& p : r.trajectory.Positions(*env)) {
    rewards[0].push_back(GoalReward(p, goal, mode, config.sparse_epsilon));
  }
  WriteFileAtomic(Join(output_dir, "plan_trajectory.csv"),
                  TraceTable({r.trajectory}, &rewards).ToString());
  WriteFileAtomic(Join(output_dir, "plots/plan.svg"),
                  SvgLinePlot({TraceSeries(r.trajectory, *env, "executed")},
                              "Planned episode (" + ToString(mode) + ")", "x", "y", true, {goal}));
  return {{"delta", r.delta}, {"reached", r.reached ? 1.0 : 0.0}, {"return", r.achieved_return}};
}

Summary RunEvalSuite(const DadsTrainer& trainer, const RunConfig& config,
                     const std::string& suite, const std::string& output_dir) {
  static const std::vector<std::string> kSuites{"variance", "orientation", "prediction",
                                                "navigation", "sparse"};
  if (suite == "all") {
    Summary all;
    for (const auto& s : kSuites) {
      for (auto& kv : RunEvalSuite(trainer, config, s, output_dir)) all.push_back(kv);
    }
    return all;
  }
  auto env = config.MakeEnv();
  const Agent& agent = trainer.state().agent;
  PolicyController deterministic(agent.policy(), true);
  PolicyController stochastic(agent.policy(), false);
  Summary summary;

  if (suite == "variance") {
    const auto skills = PriorSkills(config, config.eval_variance_skills, kEvalStreamBase + 4);
    RngStream rng(config.seed, kEvalStreamBase + 5);
    RandomActionController random_policy(env->spec().action_dim);
    const auto det = SkillVariance(deterministic, *env, skills, config.eval_episodes_per_skill, rng);
    const auto sto = SkillVariance(stochastic, *env, skills, config.eval_episodes_per_skill, rng);
    const auto rnd = SkillVariance(random_policy, *env, skills, config.eval_episodes_per_skill, rng);
    CsvTable table({"step", "dads_deterministic", "dads_stochastic", "random_actions"});
    Series a{"DADS (deterministic)", {}, {}}, b{"DADS (stochastic)", {}, {}}, c{"random actions", {}, {}};
    for (std::size_t t = 0; t < det.per_step.size(); ++t) {
      table.AddRow(std::vector<double>{static_cast<double>(t + 1), det.per_step[t], sto.per_step[t],
                                       rnd.per_step[t]});
      for (auto* s : {&a, &b, &c}) s->x.push_back(static_cast<double>(t + 1));
      a.y.push_back(det.per_step[t]);
      b.y.push_back(sto.per_step[t]);
      c.y.push_back(rnd.per_step[t]);
    }
    WriteFileAtomic(Join(output_dir, "variance.csv"), table.ToString());
    WriteFileAtomic(Join(output_dir, "plots/variance.svg"),
                    SvgLinePlot({a, b, c}, "Normalized per-skill position spread", "step",
                                "std / mean position norm"));
    summary = {{"variance_dads_deterministic", det.mean},
               {"variance_dads_stochastic", sto.mean},
               {"variance_random_actions", rnd.mean}};
  } else if (suite == "orientation") {
    RequireContinuous2D(config, "orientation map");
    RngStream rng(config.seed, kEvalStreamBase + 6);
    const OrientationMap map = ComputeOrientationMap(deterministic, *env, config.eval_grid, rng);
    const OrientationMap coarse = ComputeOrientationMap(deterministic, *env, 4, rng);
    CsvTable table({"i", "j", "z0", "z1", "heading_rad", "dx", "dy"});
    for (int i = 0; i < map.resolution; ++i) {
      for (int j = 0; j < map.resolution; ++j) {
        const int k = i * map.resolution + j;
        table.AddRow(std::vector<double>{static_cast<double>(i), static_cast<double>(j), map.skills[k][0],
                                         map.skills[k][1], map.headings[k], map.displacements[k].x(),
                                         map.displacements[k].y()});
      }
    }
    WriteFileAtomic(Join(output_dir, "orientation.csv"), table.ToString());
    WriteFileAtomic(Join(output_dir, "plots/orientation.svg"),
                    SvgHeadingMap(map.headings, map.resolution, "Skill orientation map"));
    summary = {{"orientation_smoothness_deg", OrientationSmoothness(map)},
               {"quadrants_covered_4x4", static_cast<double>(QuadrantsCovered(coarse.displacements))}};
  } else if (suite == "prediction") {
    const auto skills = PriorSkills(config, config.eval_error_skills, kEvalStreamBase + 7);
    RngStream rng(config.seed, kEvalStreamBase + 8);
    const auto curve = PredictionErrorCurve(trainer.state().dynamics, stochastic, *env, skills,
                                            config.eval_episodes_per_skill,
                                            config.eval_error_horizon, rng);
    CsvTable table({"step", "normalized_error"});
    Series s{"skill-dynamics", {}, {}};
    double worst = 0.0;
    for (std::size_t h = 0; h < curve.size(); ++h) {
      table.AddRow(std::vector<double>{static_cast<double>(h + 1), curve[h]});
      s.x.push_back(static_cast<double>(h + 1));
      s.y.push_back(curve[h]);
      if (std::isfinite(curve[h])) worst = std::max(worst, curve[h]);
    }
    WriteFileAtomic(Join(output_dir, "prediction_error.csv"), table.ToString());
    WriteFileAtomic(Join(output_dir, "plots/prediction_error.svg"),
                    SvgLinePlot({s}, "Open-loop position prediction error", "step",
                                "error / actual position norm"));
    summary = {{"prediction_error_final", curve.back()}, {"prediction_error_max", worst}};
  } else if (suite == "navigation" || suite == "sparse") {
    RequireContinuous2D(config, "latent planning");
    const bool sparse = suite == "sparse";
    const auto goals = SampleGoals(config.goals, config.goal_seed);
    RngStream rng(config.seed, kEvalStreamBase + (sparse ? 10 : 9));
    ModelSimulator simulator(trainer.state().dynamics);
    const RewardMode mode = sparse ? RewardMode::kSparse : RewardMode::kDense;
    const NavigationReport nav =
        EvaluateNavigation(deterministic, simulator, *env, goals, mode, config.sparse_epsilon,
                           sparse ? config.sparse_planner : config.planner, rng);
    CsvTable table({"goal_x", "goal_y", "delta", "reached", "return"});
    std::vector<Series> traces;
    std::vector<Eigen::Vector2d> markers;
    for (const auto& g : nav.goals) {
      table.AddRow(std::vector<double>{g.goal.x(), g.goal.y(), g.delta, g.reached ? 1.0 : 0.0,
                                       g.achieved_return});
      traces.push_back(TraceSeries(g.trajectory, *env, ""));
      markers.push_back(g.goal);
    }
    WriteFileAtomic(Join(output_dir, sparse ? "navigation_sparse.csv" : "navigation.csv"),
                    table.ToString());
    WriteFileAtomic(Join(output_dir, sparse ? "plots/navigation_sparse.svg" : "plots/navigation.svg"),
                    SvgLinePlot(traces, std::string("Zero-shot planning (") + ToString(mode) + ")", "x",
                                "y", true, markers));
    const std::string prefix = sparse ? "sparse_" : "dense_";
    summary = {{prefix + "mean_delta", nav.mean_delta},
               {prefix + "std_delta", nav.std_delta},
               {prefix + "goals_reached", static_cast<double>(nav.reached)}};
  } else {
    throw InvalidArgument("unknown eval suite '" + suite +
                          "' (expected variance, orientation, prediction, navigation, sparse or all)");
  }
  return summary;
}

Summary ExportTraces(const DadsTrainer& trainer, const RunConfig& config,
                     const std::string& output_dir, std::vector<Vector> skills) {
  if (skills.empty()) {
    if (config.skill_kind == SkillKind::kContinuous && config.skill_dim == 2) {
      skills = SkillGrid(4);
    } else if (config.skill_kind == SkillKind::kDiscrete) {
      for (const Skill& s : config.MakeSkillSpace().Enumerate()) skills.push_back(s.values);
    } else {
      skills = PriorSkills(config, 16, kEvalStreamBase + 11);
    }
  }
  auto env = config.MakeEnv();
  RngStream rng(config.seed, kEvalStreamBase + 12);
  PolicyController controller(trainer.state().agent.policy(), true);
  std::vector<Trajectory> episodes;
  std::vector<Series> series;
  for (std::size_t i = 0; i < skills.size(); ++i) {
    episodes.push_back(RollOut(controller, *env, skills[i], rng, static_cast<int>(i)));
    series.push_back(TraceSeries(episodes.back(), *env, ""));
  }
  // Intrinsic rewards are a training-time quantity; traces carry the
  // skill-dynamics log-density of each step instead.
  std::vector<std::vector<double>> logq;
  for (const auto& ep : episodes) {
    std::vector<double> row;
    for (const auto& tr : ep.transitions) {
      row.push_back(trainer.state().dynamics.ready()
                        ? trainer.state().dynamics.LogProb(tr.state, tr.skill, tr.next_state)
                        : std::nan(""));
    }
    logq.push_back(std::move(row));
  }
  WriteFileAtomic(Join(output_dir, "traces.csv"), TraceTable(episodes, &logq).ToString());
  WriteFileAtomic(Join(output_dir, "plots/traces.svg"),
                  SvgLinePlot(series, "Skill rollouts (x-y)", "x", "y", true));
  return {{"episodes", static_cast<double>(episodes.size())}};
}

Summary RunBaseline(const RunConfig& config, BaselineVariant variant, RewardMode mode,
                    const std::string& output_dir) {
  BaselineConfig bc;
  bc.variant = variant;
  bc.budget = config.baseline_budget > 0 ? config.baseline_budget
                                          : static_cast<int>(config.TrainingBudget());
  bc.transitions_per_iter = config.trainer.transitions_per_iter;
  bc.dynamics_steps = config.trainer.dynamics_steps;
  bc.dynamics_batch = config.trainer.dynamics_batch;
  bc.hidden_sizes = config.dynamics_hidden;
  bc.expert_count = config.dynamics_experts;
  bc.learning_rate = config.agent.learning_rate;
  bc.mode = mode;
  bc.epsilon = config.sparse_epsilon;
  bc.planner.gamma = config.planner.gamma;
  bc.planner.smooth_beta = config.planner.smooth_beta;
  bc.planner.plan_std = config.planner.plan_std;
  bc.planner.episode_horizon = config.planner.episode_horizon;
  auto env = config.MakeEnv();
  const auto goals = SampleGoals(config.goals, config.goal_seed);
  const BaselineReport rep = RunBaselineMbrl(bc, *env, goals, config.seed);
  CsvTable table({"goal_x", "goal_y", "delta", "reached"});
  for (const auto& g : rep.navigation.goals) {
    table.AddRow(std::vector<double>{g.goal.x(), g.goal.y(), g.delta, g.reached ? 1.0 : 0.0});
  }
  WriteFileAtomic(Join(output_dir, "baseline_" + ToString(variant) + ".csv"), table.ToString());
  return {{"baseline_mean_delta", rep.navigation.mean_delta},
          {"baseline_goals_reached", static_cast<double>(rep.navigation.reached)},
          {"baseline_steps", static_cast<double>(rep.steps_collected)}};
}

}  // namespace skillmpc
