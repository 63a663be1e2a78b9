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

#include "replayforge/agent/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rf::agent {

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (sync_period < 1) throw std::invalid_argument("sync period must be >= 1");
  if (!(eps_min <= eps_start)) throw std::invalid_argument("eps_min must not exceed eps_start");
  if (eps_min < 0.0 || eps_start > 1.0) throw std::invalid_argument("epsilon must lie in [0,1]");
  if (!(eps_decay > 0.0 && eps_decay <= 1.0)) throw std::invalid_argument("eps_decay must be in (0,1]");
  if (n_step < 1) throw std::invalid_argument("n_step must be >= 1");
  if (train_every < 1) throw std::invalid_argument("train_every must be >= 1");
}

int masked_argmax(const Eigen::VectorXd& q, std::span<const std::uint8_t> legal_mask) {
  if (!legal_mask.empty() && legal_mask.size() != static_cast<std::size_t>(q.size())) {
    throw std::invalid_argument("legal mask size does not match action count");
  }
  int best = -1;
  for (Eigen::Index a = 0; a < q.size(); ++a) {
    if (!legal_mask.empty() && !legal_mask[static_cast<std::size_t>(a)]) continue;
    if (best < 0 || q(a) > q(best)) best = static_cast<int>(a);
  }
  if (best < 0) throw std::invalid_argument("no legal action");
  return best;
}

int select_action(const QNetwork& net, std::span<const double> state, double epsilon,
                  std::span<const std::uint8_t> legal_mask, Rng& rng) {
  const auto n = static_cast<std::size_t>(net.output_size());
  if (!legal_mask.empty() && legal_mask.size() != n) throw std::invalid_argument("legal mask size mismatch");
  std::vector<int> legal;
  legal.reserve(n);
  for (std::size_t a = 0; a < n; ++a)
    if (legal_mask.empty() || legal_mask[a]) legal.push_back(static_cast<int>(a));
  if (legal.empty()) throw std::invalid_argument("no legal action");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
    return legal[pick(rng)];
  }
  return masked_argmax(net.forward(state), legal_mask);
}

Eigen::MatrixXd stack_states(std::span<const replay::Transition* const> batch, bool next) {
  if (batch.empty()) return {};
  const auto dim = static_cast<Eigen::Index>(batch.front()->state.size());
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& v = next ? batch[i]->next_state : batch[i]->state;
    if (static_cast<Eigen::Index>(v.size()) != dim) throw std::invalid_argument("ragged batch");
    for (Eigen::Index r = 0; r < dim; ++r) m(r, static_cast<Eigen::Index>(i)) = v[static_cast<std::size_t>(r)];
  }
  return m;
}

std::vector<double> compute_target(std::span<const replay::Transition* const> batch, const QNetwork& online,
                                   const QNetwork& target, double bootstrap_gamma, bool double_q) {
  if (online.layer_sizes() != target.layer_sizes()) throw std::invalid_argument("online/target shapes differ");
  std::vector<double> y(batch.size());
  if (batch.empty()) return y;
  const Eigen::MatrixXd next = stack_states(batch, true);
  const Eigen::MatrixXd qt = target.forward_batch(next);
  Eigen::MatrixXd qo;
  if (double_q) qo = online.forward_batch(next);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const replay::Transition& t = *batch[i];
    if (t.done) {
      y[i] = t.reward;
      continue;
    }
    double boot;
    if (double_q) {
      Eigen::Index a_star = 0;
      qo.col(col).maxCoeff(&a_star);
      boot = qt(a_star, col);
    } else {
      boot = qt.col(col).maxCoeff();
    }
    y[i] = static_cast<double>(t.reward) + bootstrap_gamma * boot;
  }
  return y;
}

EpsilonSchedule::EpsilonSchedule(double start, double min, double decay) : eps_(start), min_(min), decay_(decay) {}

double EpsilonSchedule::advance() {
  eps_ = std::max(min_, eps_ * decay_);
  return eps_;
}

NStepAccumulator::NStepAccumulator(int n, double gamma) : n_(n), gamma_(gamma) {
  if (n < 1) throw std::invalid_argument("n-step window must be >= 1");
}

replay::Transition NStepAccumulator::collapse(std::size_t from) const {
  replay::Transition out = window_[from];
  double ret = 0.0;
  double g = 1.0;
  for (std::size_t k = from; k < window_.size(); ++k) {
    ret += g * window_[k].reward;
    g *= gamma_;
  }
  out.reward = static_cast<float>(ret);
  out.next_state = window_.back().next_state;
  out.done = window_.back().done;
  if (!window_.back().achieved.empty()) out.achieved = window_.back().achieved;
  return out;
}

std::vector<replay::Transition> NStepAccumulator::push(replay::Transition incoming) {
  if (!window_.empty() && window_.back().episode_id != incoming.episode_id) {
    throw std::logic_error("n-step window mixes episodes");
  }
  const bool done = incoming.done;
  window_.push_back(std::move(incoming));
  std::vector<replay::Transition> out;
  if (done) return flush();
  if (static_cast<int>(window_.size()) == n_) {
    out.push_back(collapse(0));
    window_.pop_front();
  }
  return out;
}

std::vector<replay::Transition> NStepAccumulator::flush() {
  std::vector<replay::Transition> out;
  for (std::size_t i = 0; i < window_.size(); ++i) out.push_back(collapse(i));
  window_.clear();
  return out;
}

TargetSync::TargetSync(SyncMode mode, int period) : mode_(mode), period_(period) {
  if (period < 1) throw std::invalid_argument("sync period must be >= 1");
}

bool TargetSync::tick() {
  if (++counter_ % period_ != 0) return false;
  ++syncs_;
  return true;
}

bool TargetSync::on_step() { return mode_ == SyncMode::Steps && tick(); }
bool TargetSync::on_episode() { return mode_ == SyncMode::Episodes && tick(); }

namespace {
std::vector<int> full_layers(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}
}  // namespace

DqnAgent::DqnAgent(int state_dim, int action_count, AgentConfig config, Rng& rng)
    : cfg_((config.validate(), std::move(config))),
      online_(full_layers(state_dim, cfg_.hidden, action_count), cfg_.activation, rng),
      target_(online_),
      optimizer_(online_.parameter_count(), AdamConfig{cfg_.lr}),
      eps_(cfg_.eps_start, cfg_.eps_min, cfg_.eps_decay),
      sync_(cfg_.sync_mode, cfg_.sync_period) {}

double DqnAgent::bootstrap_gamma() const { return std::pow(cfg_.gamma, cfg_.n_step); }

int DqnAgent::act(std::span<const double> state, std::span<const std::uint8_t> mask, Rng& rng, bool greedy) const {
  return select_action(online_, state, greedy ? 0.0 : eps_.value(), mask, rng);
}

std::optional<LearnResult> DqnAgent::learn(replay::ReplayBuffer& buffer, Rng& rng) {
  if (buffer.size() < std::max(cfg_.batch_size, cfg_.learn_start)) return std::nullopt;
  const replay::SampledBatch batch = buffer.sample(cfg_.batch_size, rng);
  const std::vector<double> y = compute_target(batch.items, online_, target_, bootstrap_gamma(), cfg_.double_q);
  const Eigen::MatrixXd states = stack_states(batch.items, false);
  std::vector<int> actions(batch.items.size());
  for (std::size_t i = 0; i < actions.size(); ++i) actions[i] = static_cast<int>(batch.items[i]->action);

  const Eigen::MatrixXd q = online_.forward_batch(states);
  LearnResult res;
  res.td_abs.resize(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    res.td_abs[i] = std::abs(y[i] - q(actions[i], static_cast<Eigen::Index>(i)));
  }
  res.loss = backward_and_step(online_, states, actions, y, batch.is_weights, cfg_.loss, cfg_.grad_clip, optimizer_);
  if (replay::is_prioritized(buffer.strategy())) buffer.update_td(batch.indices, res.td_abs);
  return res;
}

void DqnAgent::on_step() {
  if (sync_.on_step()) sync_target();
}

void DqnAgent::on_episode() {
  if (sync_.on_episode()) sync_target();
}

}  // namespace rf::agent
