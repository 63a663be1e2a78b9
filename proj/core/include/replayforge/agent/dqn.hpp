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
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "replayforge/agent/network.hpp"
#include "replayforge/common.hpp"
#include "replayforge/replay/buffer.hpp"

namespace rf::agent {

enum class SyncMode { Steps, Episodes };

struct AgentConfig {
  double gamma = 0.99;
  double lr = 3e-4;
  std::size_t batch_size = 200;
  SyncMode sync_mode = SyncMode::Episodes;
  int sync_period = 100;
  double grad_clip = 1.0;
  double eps_start = 1.0;
  double eps_min = 0.05;
  double eps_decay = 0.99931;
  int n_step = 1;
  bool double_q = false;
  LossKind loss = LossKind::Huber;
  std::vector<int> hidden{128, 128};
  Activation activation = Activation::ReLU;
  std::size_t learn_start = 0;  // minimum buffer size before updates
  int train_every = 1;           // environment steps per learner update

  void validate() const;
};

/// Uniform over legal actions with probability epsilon, otherwise the masked
/// argmax (lowest index on ties). An empty mask means every action is legal.
int select_action(const QNetwork& net, std::span<const double> state, double epsilon,
                  std::span<const std::uint8_t> legal_mask, Rng& rng);

/// Masked argmax with lowest-index tie-breaking.
int masked_argmax(const Eigen::VectorXd& q, std::span<const std::uint8_t> legal_mask);

/// DQN: r + g (1-d) max_a Qt(s',a). DDQN: r + g (1-d) Qt(s', argmax_a Q(s',a)).
/// `bootstrap_gamma` is gamma^n for n-step transitions.
std::vector<double> compute_target(std::span<const replay::Transition* const> batch, const QNetwork& online,
                                   const QNetwork& target, double bootstrap_gamma, bool double_q);

class EpsilonSchedule {
 public:
  EpsilonSchedule(double start, double min, double decay);
  double value() const { return eps_; }
  /// eps <- max(eps_min, eps * decay)
  double advance();
  void reset(double start) { eps_ = start; }

 private:
  double eps_;
  double min_;
  double decay_;
};

/// Collapses n consecutive transitions of one episode into one.
class NStepAccumulator {
 public:
  NStepAccumulator(int n, double gamma);

  int n() const { return n_; }
  /// Returns the transitions ready for storage: one once the window is full,
  /// or every pending one (with shortened horizons) when `incoming` ends the
  /// episode.
  std::vector<replay::Transition> push(replay::Transition incoming);
  /// Emit whatever is pending with its actual horizon; used on truncation.
  std::vector<replay::Transition> flush();
  void clear() { window_.clear(); }
  std::size_t pending() const { return window_.size(); }

 private:
  replay::Transition collapse(std::size_t from) const;

  int n_;
  double gamma_;
  std::deque<replay::Transition> window_;
};

/// Hard target sync every `period` steps or episodes.
class TargetSync {
 public:
  TargetSync(SyncMode mode, int period);
  /// Returns true when a sync is due after this step.
  bool on_step();
  bool on_episode();
  std::int64_t syncs() const { return syncs_; }

 private:
  bool tick();
  SyncMode mode_;
  int period_;
  std::int64_t counter_ = 0;
  std::int64_t syncs_ = 0;
};

struct LearnResult {
  double loss = 0.0;
  std::vector<double> td_abs;
};

/// Online/target network pair with Adam, epsilon schedule and sync logic.
class DqnAgent {
 public:
  DqnAgent(int state_dim, int action_count, AgentConfig config, Rng& rng);

  const AgentConfig& config() const { return cfg_; }
  QNetwork& online() { return online_; }
  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }
  EpsilonSchedule& epsilon() { return eps_; }
  const EpsilonSchedule& epsilon() const { return eps_; }
  double bootstrap_gamma() const;

  int act(std::span<const double> state, std::span<const std::uint8_t> mask, Rng& rng, bool greedy = false) const;

  /// Sample a batch, regress toward TD targets, push |delta| back to the buffer.
  std::optional<LearnResult> learn(replay::ReplayBuffer& buffer, Rng& rng);

  void on_step();
  void on_episode();
  void sync_target() { target_.copy_parameters_from(online_); }
  std::int64_t syncs() const { return sync_.syncs(); }
  std::int64_t updates() const { return optimizer_.steps(); }

 private:
  AgentConfig cfg_;
  QNetwork online_;
  QNetwork target_;
  Adam optimizer_;
  EpsilonSchedule eps_;
  TargetSync sync_;
};

/// Stack float state vectors as columns of a double matrix.
Eigen::MatrixXd stack_states(std::span<const replay::Transition* const> batch, bool next);

}  // namespace rf::agent
