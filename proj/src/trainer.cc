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

#include "skillmpc/trainer.h"

#include <chrono>
#include <cmath>
#include <numeric>

#include "skillmpc/error.h"

namespace skillmpc {

namespace {

void Shuffle(std::vector<int>& v, RngStream& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    std::swap(v[i], v[rng.UniformInt(i + 1)]);
  }
}

}  // namespace

Trajectory RollOut(const SkillController& controller, Environment& env,
                   const Vector& skill, RngStream& rng, int episode_id) {
  Trajectory traj;
  const int horizon = env.spec().horizon;
  traj.transitions.reserve(horizon);
  Vector state = env.Reset(rng);
  for (int t = 0; t < horizon; ++t) {
    Transition tr;
    tr.state = state;
    tr.skill = skill;
    tr.action = controller.Act(env.PolicyObservation(state), skill, rng);
    tr.next_state = env.Step(state, tr.action, rng);
    tr.episode_id = episode_id;
    tr.step_index = t;
    state = tr.next_state;
    traj.transitions.push_back(std::move(tr));
  }
  return traj;
}

std::vector<Transition> CollectRollouts(const SkillController& controller,
                                        Environment& env,
                                        const SkillSpace& space,
                                        int min_transitions, RngStream& rng,
                                        int first_episode_id,
                                        int resample_every) {
  if (min_transitions < 1) throw InvalidArgument("collect: M must be >= 1");
  if (resample_every < 0) throw InvalidArgument("collect: resample_every < 0");
  const int horizon = env.spec().horizon;
  std::vector<Transition> out;
  out.reserve(min_transitions + horizon);
  int episode = first_episode_id;
  while (static_cast<int>(out.size()) < min_transitions) {
    Vector skill = space.Sample(rng).values;
    Vector state = env.Reset(rng);
    for (int t = 0; t < horizon; ++t) {
      if (resample_every > 0 && t > 0 && t % resample_every == 0) {
        skill = space.Sample(rng).values;
      }
      Transition tr;
      tr.state = state;
      tr.skill = skill;
      tr.action = controller.Act(env.PolicyObservation(state), skill, rng);
      tr.next_state = env.Step(state, tr.action, rng);
      tr.episode_id = episode;
      tr.step_index = t;
      state = tr.next_state;
      out.push_back(std::move(tr));
    }
    ++episode;
  }
  return out;
}

AgentBatch MakeAgentBatch(const Environment& env,
                          const std::vector<Transition>& transitions,
                          std::span<const int> rows) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw InvalidArgument("agent batch: no rows");
  const Transition& first = transitions.at(rows[0]);
  const int obs = static_cast<int>(env.PolicyObservation(first.state).size());
  AgentBatch b;
  b.observations.resize(n, obs);
  b.next_observations.resize(n, obs);
  b.skills.resize(n, first.skill.size());
  b.actions.resize(n, first.action.size());
  b.rewards.resize(n);
  for (int i = 0; i < n; ++i) {
    const Transition& tr = transitions.at(rows[i]);
    b.observations.row(i) = env.PolicyObservation(tr.state).transpose();
    b.next_observations.row(i) = env.PolicyObservation(tr.next_state).transpose();
    b.skills.row(i) = tr.skill.transpose();
    b.actions.row(i) = tr.action.transpose();
    b.rewards[i] = tr.intrinsic_reward;
  }
  return b;
}

DadsTrainer::DadsTrainer(std::unique_ptr<Environment> env, SkillSpace space,
                         TrainerConfig trainer, AgentConfig agent,
                         RewardConfig reward, std::vector<int> dynamics_hidden,
                         int expert_count, std::uint64_t seed)
    : env_(std::move(env)),
      space_(space),
      trainer_(trainer),
      reward_(reward) {
  if (trainer_.transitions_per_iter < env_->spec().horizon) {
    throw ConfigError("trainer.transitions_per_iter must be >= env.horizon");
  }
  if (trainer_.dynamics_steps < 0 || trainer_.dynamics_batch < 1 ||
      trainer_.iterations < 0 || agent.updates_per_iter < 0 ||
      agent.batch_size < 1) {
    throw ConfigError("trainer/agent step counts must be positive");
  }
  if (reward_.prior_samples < 1) throw ConfigError("reward.L must be >= 1");
  RngStream init(seed, 0);
  const EnvSpec& spec = env_->spec();
  state_.dynamics = SkillDynamicsModel(
      SkillDynamicsConfig::ForEnvironment(spec, space_.dim(),
                                          std::move(dynamics_hidden),
                                          expert_count),
      init);
  state_.dynamics_optimizer = Adam(AdamOptions{agent.learning_rate});
  state_.agent = Agent(static_cast<int>(spec.PolicyObservationIndices().size()),
                       space_.dim(), spec.action_dim, agent, init);
  state_.streams = TrainerStreams(seed);
}

void DadsTrainer::FitDynamics(const DynamicsBatch& batch,
                              IterationReport* report) {
  SkillDynamicsModel& model = state_.dynamics;
  model.UpdateNormalizers(batch);
  report->dynamics_loss_before = model.MeanNegLogLikelihood(batch);
  std::vector<int> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  const int bs = std::min(trainer_.dynamics_batch, batch.size());
  std::size_t cursor = order.size();
  std::vector<int> rows(bs);
  for (int k = 0; k < trainer_.dynamics_steps; ++k) {
    if (cursor + bs > order.size()) {
      Shuffle(order, state_.streams.fit);
      cursor = 0;
    }
    std::copy(order.begin() + cursor, order.begin() + cursor + bs, rows.begin());
    cursor += bs;
    model.FitStep(batch.Rows(rows), state_.dynamics_optimizer);
  }
  report->dynamics_loss_after = model.MeanNegLogLikelihood(batch);
}

void DadsTrainer::UpdateAgent(IterationReport* report) {
  Agent& agent = state_.agent;
  const int n = static_cast<int>(last_.size());
  const int updates = agent.config().updates_per_iter;
  const int bs = agent.config().batch_size;
  std::vector<int> rows(bs);
  double critic = 0.0, policy = 0.0;
  for (int u = 0; u < updates; ++u) {
    for (int i = 0; i < bs; ++i) rows[i] = state_.streams.update.UniformInt(n);
    const UpdateReport r =
        agent.Update(MakeAgentBatch(*env_, last_, rows), state_.streams.update);
    if (!std::isfinite(r.critic_loss) || !std::isfinite(r.policy_loss)) {
      throw NumericFault("non-finite agent loss at update " + std::to_string(u));
    }
    critic += r.critic_loss;
    policy += r.policy_loss;
  }
  if (updates > 0) {
    report->critic_loss = critic / updates;
    report->policy_loss = policy / updates;
  }
}

IterationReport DadsTrainer::RunIteration() {
  const auto start = std::chrono::steady_clock::now();
  IterationReport report;
  report.iteration = state_.iteration + 1;
  DadsState backup = state_;
  try {
    PolicyController controller(state_.agent.policy(), /*deterministic=*/false);
    last_ = CollectRollouts(controller, *env_, space_,
                            trainer_.transitions_per_iter,
                            state_.streams.collect, state_.episodes_seen,
                            trainer_.resample_every);
    report.transitions = static_cast<int>(last_.size());
    report.episodes = last_.back().episode_id - state_.episodes_seen + 1;
    state_.episodes_seen += report.episodes;

    FitDynamics(DynamicsBatch::FromTransitions(last_), &report);

    const std::vector<double> rewards = ComputeIntrinsicRewards(
        state_.dynamics, last_, space_, reward_, state_.streams.reward);
    double sum = 0.0;
    for (std::size_t i = 0; i < last_.size(); ++i) {
      last_[i].intrinsic_reward = rewards[i];
      sum += rewards[i];
    }
    report.mean_intrinsic_reward = sum / static_cast<double>(rewards.size());

    UpdateAgent(&report);
    for (double v : {report.dynamics_loss_before, report.dynamics_loss_after,
                     report.mean_intrinsic_reward}) {
      if (!std::isfinite(v)) throw NumericFault("non-finite iteration statistic");
    }
  } catch (const NumericFault& e) {
    // Keep the advanced random streams so the retry sees fresh data.
    TrainerStreams streams = state_.streams;
    const int episodes = state_.episodes_seen;
    state_ = std::move(backup);
    state_.streams = streams;
    state_.episodes_seen = episodes;
    last_.clear();
    report.failed = true;
    report.failure = e.what();
  }
  state_.iteration = report.iteration;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace skillmpc
