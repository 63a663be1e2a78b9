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

#include "replayforge/harness/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace rf::harness {

DecayUnit parse_decay_unit(const std::string& name) {
  if (name == "step") return DecayUnit::Step;
  if (name == "episode") return DecayUnit::Episode;
  throw ConfigError("unknown epsilon decay unit: " + name);
}

void write_metrics_header(std::ostream& out) {
  out << "run_id,episode,step,length,return,loss,epsilon,omega_now,success,task_metric,wall_ms\n";
}

void write_metrics_row(std::ostream& out, const EpisodeMetrics& m) {
  out << m.run_id << ',' << m.episode << ',' << m.step << ',' << m.length << ',' << format_double(m.episode_return)
      << ',' << format_double(m.loss) << ',' << format_double(m.epsilon) << ',' << format_double(m.omega_now) << ','
      << (m.success ? 1 : 0) << ',' << format_double(m.task_metric) << ',' << format_double(m.wall_ms) << '\n';
}

replay::BufferConfig Trainer::buffer_config(const Environment& env, const TrainerConfig& cfg) {
  replay::BufferConfig b = cfg.replay;
  b.state_dim = static_cast<std::uint32_t>(env.observation_size());
  b.action_count = static_cast<std::uint32_t>(env.action_count());
  b.env_id = env.id();
  return b;
}

namespace {
std::vector<float> to_float(const std::vector<double>& v) { return {v.begin(), v.end()}; }

void check(const Environment& env, const TrainerConfig& cfg) {
  if (cfg.her_k < 0) throw ConfigError("her_k must be >= 0");
  if (cfg.replay.strategy == replay::Strategy::HER && env.goal_conditioned() && cfg.agent.n_step != 1) {
    throw ConfigError("hindsight relabeling requires n_step = 1");
  }
}
}  // namespace

Trainer::Trainer(Environment& env, TrainerConfig config, std::uint64_t seed)
    : env_(env),
      cfg_((check(env, config), std::move(config))),
      rng_(seed),
      agent_(static_cast<int>(env.observation_size()), static_cast<int>(env.action_count()), cfg_.agent, rng_),
      buffer_(buffer_config(env, cfg_)) {}

Trainer::Trainer(Environment& env, TrainerConfig config, std::uint64_t seed, replay::ReplayBuffer warm_buffer)
    : Trainer(env, std::move(config), seed) {
  warm_buffer.require_compatible(buffer_.config().state_dim, buffer_.config().action_count);
  if (warm_buffer.strategy() != buffer_.strategy() || warm_buffer.capacity() != buffer_.capacity()) {
    replay::transfer_into(warm_buffer, buffer_);
  } else {
    buffer_ = replay::transfer_buffer(warm_buffer);
  }
  next_episode_ = buffer_.next_episode_id();
}

EpisodeMetrics Trainer::run_episode() {
  const auto t0 = std::chrono::steady_clock::now();
  const bool her = cfg_.replay.strategy == replay::Strategy::HER && env_.goal_conditioned();
  agent::NStepAccumulator nstep(cfg_.agent.n_step, cfg_.agent.gamma);
  const std::uint32_t ep_id = next_episode_++;

  std::vector<double> obs = env_.reset(rng_);
  replay::Episode raw;
  EpisodeMetrics m;
  m.run_id = cfg_.run_id;
  m.episode = episodes_;
  double loss_sum = 0.0;
  int updates = 0;
  bool done = false;
  while (!done) {
    const std::vector<std::uint8_t> mask = env_.legal_mask();
    const int action = agent_.act(obs, mask, rng_);
    StepResult r = env_.step(static_cast<std::size_t>(action), rng_);
    ++steps_;
    ++m.length;
    m.episode_return += r.reward;
    done = r.done;
    m.success = r.success;

    replay::Transition t;
    t.state = to_float(obs);
    t.action = static_cast<std::uint32_t>(action);
    t.reward = static_cast<float>(r.reward);
    t.next_state = to_float(r.observation);
    t.done = r.done;
    t.episode_id = ep_id;
    t.step = static_cast<std::uint32_t>(m.length);
    if (her) {
      t.goal = env_.goal_vector();
      t.achieved = env_.achieved_vector();
      raw.transitions.push_back(t);
    }
    for (auto& ready : nstep.push(std::move(t))) buffer_.add(std::move(ready));

    if (step_hook_) step_hook_(steps_, r, env_);
    if (steps_ % cfg_.agent.train_every == 0) {
      if (auto res = agent_.learn(buffer_, rng_)) {
        loss_sum += res->loss;
        ++updates;
      }
    }
    agent_.on_step();
    if (cfg_.eps_decay_unit == DecayUnit::Step) agent_.epsilon().advance();
    obs = std::move(r.observation);
  }
  for (auto& rest : nstep.flush()) buffer_.add(std::move(rest));
  if (her && cfg_.her_k > 0) {
    const auto relabeler = [this](const replay::Transition& tr, std::span<const float> g) {
      return env_.relabel(tr, g);
    };
    for (auto& h : replay::her_relabel(raw, cfg_.her_k, relabeler, rng_)) buffer_.add(std::move(h), false);
  }
  buffer_.on_episode_end(ep_id);
  agent_.on_episode();
  if (cfg_.eps_decay_unit == DecayUnit::Episode) agent_.epsilon().advance();

  m.step = steps_;
  m.loss = updates ? loss_sum / updates : std::numeric_limits<double>::quiet_NaN();
  m.epsilon = agent_.epsilon().value();
  m.omega_now = buffer_.omega_now();
  m.task_metric = env_.task_metric();
  m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  ++episodes_;
  return m;
}

std::vector<EpisodeMetrics> Trainer::run(std::int64_t episodes, const EpisodeHook& hook) {
  std::vector<EpisodeMetrics> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(episodes, 0)));
  for (std::int64_t e = 0; e < episodes; ++e) {
    out.push_back(run_episode());
    if (hook) hook(out.back());
  }
  return out;
}

std::vector<double> q_values(const agent::QNetwork& net, const std::vector<double>& state) {
  const Eigen::VectorXd q = net.forward(state);
  return {q.data(), q.data() + q.size()};
}

}  // namespace rf::harness
