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

#include "replayforge/harness/chain_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rf::harness {

void ChainConfig::validate() const {
  if (length < 2) throw ConfigError("chain length must be >= 2");
  if (!(slip >= 0.0 && slip < 1.0)) throw ConfigError("chain slip must be in [0,1)");
  if (max_steps < 0) throw ConfigError("chain max_steps must be >= 0");
}

ChainMdp::ChainMdp(ChainConfig config) : cfg_((config.validate(), config)) {
  if (cfg_.max_steps == 0) cfg_.max_steps = 4 * cfg_.length;
}

std::vector<double> ChainMdp::observation(int position) const {
  std::vector<double> obs(static_cast<std::size_t>(cfg_.length), 0.0);
  obs[static_cast<std::size_t>(position)] = 1.0;
  return obs;
}

std::vector<double> ChainMdp::reset(Rng&) {
  pos_ = 0;
  t_ = 0;
  return_ = 0.0;
  done_ = false;
  return observation(pos_);
}

StepResult ChainMdp::step(std::size_t action, Rng& rng) {
  if (done_) throw std::logic_error("step on a finished episode");
  if (action > 1) throw std::out_of_range("action index out of range");
  int move = action == 1 ? 1 : -1;
  if (cfg_.slip > 0.0) {
    std::bernoulli_distribution slip(cfg_.slip);
    if (slip(rng)) move = -move;
  }
  pos_ = std::clamp(pos_ + move, 0, cfg_.length - 1);
  ++t_;
  StepResult r;
  r.success = pos_ == cfg_.length - 1;
  r.reward = r.success ? 1.0 : 0.0;
  r.done = r.success || t_ >= cfg_.max_steps;
  r.observation = observation(pos_);
  return_ += r.reward;
  done_ = r.done;
  return r;
}

std::vector<std::array<double, 2>> chain_q_values(const ChainConfig& config, double gamma, double tolerance) {
  config.validate();
  const int n = config.length;
  std::vector<std::array<double, 2>> q(static_cast<std::size_t>(n), {0.0, 0.0});
  auto value = [&](int s) { return s == n - 1 ? 0.0 : std::max(q[s][0], q[s][1]); };
  auto backup = [&](int s, int move) {
    const int s2 = std::clamp(s + move, 0, n - 1);
    return (s2 == n - 1 ? 1.0 : 0.0) + gamma * value(s2);
  };
  for (int iter = 0; iter < 100000; ++iter) {
    double delta = 0.0;
    for (int s = 0; s < n - 1; ++s) {
      for (int a = 0; a < 2; ++a) {
        const int move = a == 1 ? 1 : -1;
        const double next = (1.0 - config.slip) * backup(s, move) + config.slip * backup(s, -move);
        delta = std::max(delta, std::abs(next - q[s][a]));
        q[s][a] = next;
      }
    }
    if (delta < tolerance) break;
  }
  return q;
}

}  // namespace rf::harness
