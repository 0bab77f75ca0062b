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

// Python bindings: configs, training, checkpoints, evaluation, and the
// intrinsic-reward and MPPI primitives.

#include <memory>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skillmpc/checkpoint.h"
#include "skillmpc/config.h"
#include "skillmpc/error.h"
#include "skillmpc/intrinsic.h"
#include "skillmpc/planner.h"
#include "skillmpc/run.h"

namespace py = pybind11;

namespace skillmpc {
namespace {

py::dict ToDict(const Summary& summary) {
  py::dict d;
  for (const auto& [key, value] : summary) d[py::str(key)] = value;
  return d;
}

py::dict ToDict(const IterationReport& r) {
  py::dict d;
  d["iteration"] = r.iteration;
  d["mean_intrinsic_reward"] = r.mean_intrinsic_reward;
  d["dynamics_loss_before"] = r.dynamics_loss_before;
  d["dynamics_loss_after"] = r.dynamics_loss_after;
  d["critic_loss"] = r.critic_loss;
  d["policy_loss"] = r.policy_loss;
  d["episodes"] = r.episodes;
  d["transitions"] = r.transitions;
  d["failed"] = r.failed;
  d["failure"] = r.failure;
  return d;
}

}  // namespace
}  // namespace skillmpc

PYBIND11_MODULE(skillmpc, m) {
  using namespace skillmpc;
  m.doc() = "Skill discovery, skill dynamics and latent-space MPPI planning.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<UnsupportedOperation>(m, "UnsupportedOperation", error.ptr());
  py::register_exception<NumericFault>(m, "NumericFault", error.ptr());
  py::register_exception<UninitializedModel>(m, "UninitializedModel", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<CheckpointError>(m, "CheckpointError", error.ptr());

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def("get", [](const RunConfig& c, const std::string& key) { return GetConfigValue(c, key); })
      .def("set", [](RunConfig& c, const std::string& key,
                     const std::string& value) { SetConfigValue(c, key, value); })
      .def("validate", [](const RunConfig& c) { ValidateConfig(c); })
      .def("format", [](const RunConfig& c) { return FormatConfig(c); })
      .def("training_budget", &RunConfig::TrainingBudget)
      .def("__repr__", [](const RunConfig& c) { return FormatConfig(c); });

  m.def("config_keys", [] {
    std::vector<std::string> keys;
    for (const ConfigKey& k : ConfigKeys()) keys.push_back(k.key);
    return keys;
  });
  m.def("parse_config", [](const std::string& text) { return ParseConfig(text); }, py::arg("text"));
  m.def("load_config", [](const std::string& path) { return LoadConfigFile(path); }, py::arg("path"));

  py::class_<DadsTrainer>(m, "Trainer")
      .def_property_readonly("iteration", [](const DadsTrainer& t) { return t.state().iteration; })
      .def("run_iteration", [](DadsTrainer& t) { return ToDict(t.RunIteration()); })
      .def(
          "act",
          [](const DadsTrainer& t, const Vector& state, const Vector& skill, bool deterministic,
             std::uint64_t seed) {
            RngStream rng(seed, 0);
            return t.state().agent.policy().Act(t.env().PolicyObservation(state), skill, rng,
                                                 deterministic).action;
          },
          py::arg("state"), py::arg("skill"), py::arg("deterministic") = true, py::arg("seed") = 0)
      .def(
          "predict_next",
          [](const DadsTrainer& t, const Vector& state, const Vector& skill) {
            return t.state().dynamics.PredictNext(state, skill);
          },
          py::arg("state"), py::arg("skill"))
      .def(
          "log_prob",
          [](const DadsTrainer& t, const Vector& state, const Vector& skill, const Vector& next) {
            return t.state().dynamics.LogProb(state, skill, next);
          },
          py::arg("state"), py::arg("skill"), py::arg("next_state"));

  m.def("make_trainer", [](const RunConfig& c) { return MakeTrainer(c); }, py::arg("config"));
  m.def("load_checkpoint", [](const std::string& path) { return LoadCheckpoint(path); },
        py::arg("path"));
  m.def("read_checkpoint_config", &ReadCheckpointConfig, py::arg("path"));
  m.def(
      "save_checkpoint",
      [](const std::string& path, const RunConfig& c, const DadsTrainer& t) {
        SaveCheckpoint(path, c, t.state());
      },
      py::arg("path"), py::arg("config"), py::arg("trainer"));

  m.def(
      "train",
      [](const RunConfig& config, const std::string& output_dir, const std::string& resume,
         std::function<void(py::dict)> on_iteration) {
        TrainOptions opts;
        opts.output_dir = output_dir;
        opts.resume_checkpoint = resume;
        if (on_iteration) {
          opts.on_iteration = [&](const IterationReport& r) {
            py::gil_scoped_acquire gil;
            on_iteration(ToDict(r));
          };
        }
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = Train(config, opts);
        }
        py::dict d;
        d["final_checkpoint"] = r.final_checkpoint;
        d["metrics_path"] = r.metrics_path;
        d["rollbacks"] = r.rollbacks;
        py::list reports;
        for (const IterationReport& rep : r.reports) reports.append(ToDict(rep));
        d["reports"] = reports;
        return d;
      },
      py::arg("config"), py::arg("output_dir"), py::arg("resume") = "",
      py::arg("on_iteration") = nullptr);

  m.def(
      "eval_suite",
      [](const DadsTrainer& t, const RunConfig& c, const std::string& suite,
         const std::string& output_dir) {
        Summary s;
        {
          py::gil_scoped_release release;
          s = RunEvalSuite(t, c, suite, output_dir);
        }
        return ToDict(s);
      },
      py::arg("trainer"), py::arg("config"), py::arg("suite"), py::arg("output_dir"));
  m.def(
      "plan",
      [](const DadsTrainer& t, const RunConfig& c, const Eigen::Vector2d& goal,
         const std::string& mode, const std::string& output_dir) {
        return ToDict(RunPlan(t, c, goal, ParseRewardMode(mode), output_dir));
      },
      py::arg("trainer"), py::arg("config"), py::arg("goal"), py::arg("mode") = "dense",
      py::arg("output_dir"));
  m.def(
      "baseline",
      [](const RunConfig& c, const std::string& variant, const std::string& mode,
         const std::string& output_dir) {
        return ToDict(RunBaseline(c, ParseBaselineVariant(variant), ParseRewardMode(mode), output_dir));
      },
      py::arg("config"), py::arg("variant") = "random", py::arg("mode") = "dense",
      py::arg("output_dir"));

  m.def(
      "intrinsic_reward",
      [](double log_q, const std::vector<double>& log_q_prior, bool include_current) {
        return IntrinsicRewardFromLogDensities(log_q, log_q_prior, include_current);
      },
      py::arg("log_q"), py::arg("log_q_prior"), py::arg("include_current") = false);
  m.def(
      "mppi_weights",
      [](const std::vector<double>& rewards, double gamma) { return MppiWeights(rewards, gamma); },
      py::arg("rewards"), py::arg("gamma"));
  m.def("mppi_mean", &MppiMean, py::arg("samples"), py::arg("weights"));
}
