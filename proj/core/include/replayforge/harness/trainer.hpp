// Copyright 2026 The ReplayForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "replayforge/agent/dqn.hpp"
#include "replayforge/env.hpp"
#include "replayforge/replay/buffer.hpp"

namespace rf::harness {

enum class DecayUnit { Step, Episode };

DecayUnit parse_decay_unit(const std::string& name);

struct TrainerConfig {
  agent::AgentConfig agent;
  replay::BufferConfig replay;  // state_dim, action_count and env_id come from the environment
  int her_k = 4;                // hindsight goals per transition
  DecayUnit eps_decay_unit = DecayUnit::Episode;
  std::string run_id = "run";
};

/// One row of metrics.csv.
struct EpisodeMetrics {
  std::string run_id;
  std::int64_t episode = 0;
  std::int64_t step = 0;  // cumulative environment steps at episode end
  int length = 0;
  double episode_return = 0.0;
  double loss = 0.0;  // mean learner loss over the episode, NaN without updates
  double epsilon = 0.0;
  double omega_now = 0.0;
  bool success = false;
  double task_metric = 0.0;
  double wall_ms = 0.0;
};

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const EpisodeMetrics& m);

/// Environment-step hook: cumulative step count, the step result and the
/// environment after the step.
using StepHook = std::function<void(std::int64_t, const StepResult&, const Environment&)>;
using EpisodeHook = std::function<void(const EpisodeMetrics&)>;

/// Episodic DQN training loop: epsilon-greedy acting, n-step collapsing,
/// hindsight relabeling for goal-conditioned environments, learner updates
/// every `train_every` steps and target syncs.
class Trainer {
 public:
  Trainer(Environment& env, TrainerConfig config, std::uint64_t seed);
  /// Warm start from transferred experience. The buffer's dims must match.
  Trainer(Environment& env, TrainerConfig config, std::uint64_t seed, replay::ReplayBuffer warm_buffer);

  EpisodeMetrics run_episode();
  std::vector<EpisodeMetrics> run(std::int64_t episodes, const EpisodeHook& hook = {});

  void set_step_hook(StepHook hook) { step_hook_ = std::move(hook); }

  agent::DqnAgent& agent() { return agent_; }
  const agent::DqnAgent& agent() const { return agent_; }
  replay::ReplayBuffer& buffer() { return buffer_; }
  const replay::ReplayBuffer& buffer() const { return buffer_; }
  Rng& rng() { return rng_; }
  std::int64_t total_steps() const { return steps_; }
  std::int64_t episodes() const { return episodes_; }
  const TrainerConfig& config() const { return cfg_; }

 private:
  static replay::BufferConfig buffer_config(const Environment& env, const TrainerConfig& cfg);

  Environment& env_;
  TrainerConfig cfg_;
  Rng rng_;
  agent::DqnAgent agent_;
  replay::ReplayBuffer buffer_;
  std::uint32_t next_episode_ = 0;
  std::int64_t steps_ = 0;
  std::int64_t episodes_ = 0;
  StepHook step_hook_;
};

/// Greedy action values of a network at a state.
std::vector<double> q_values(const agent::QNetwork& net, const std::vector<double>& state);

}  // namespace rf::harness
