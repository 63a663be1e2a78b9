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

#include <array>
#include <vector>

#include "replayforge/env.hpp"

namespace rf::harness {

struct ChainConfig {
  int length = 6;
  double slip = 0.0;  // probability that the move goes the other way
  int max_steps = 0;  // 0 = 4 * length

  void validate() const;
};

/// 1-D chain: start at cell 0, action 0 moves left and 1 moves right,
/// reward 1 on reaching the last cell (terminal), 0 elsewhere. Observation
/// is the one-hot position.
class ChainMdp : public Environment {
 public:
  explicit ChainMdp(ChainConfig config);

  const ChainConfig& config() const { return cfg_; }
  std::string id() const override { return "diag_chain"; }
  std::size_t observation_size() const override { return static_cast<std::size_t>(cfg_.length); }
  std::size_t action_count() const override { return 2; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::size_t action, Rng& rng) override;
  double task_metric() const override { return return_; }

  int position() const { return pos_; }
  std::vector<double> observation(int position) const;

 private:
  ChainConfig cfg_;
  int pos_ = 0;
  int t_ = 0;
  double return_ = 0.0;
  bool done_ = true;
};

/// Optimal action values Q*(s, a) by value iteration; rows are positions,
/// the terminal row is zero.
std::vector<std::array<double, 2>> chain_q_values(const ChainConfig& config, double gamma,
                                                  double tolerance = 1e-12);

}  // namespace rf::harness
