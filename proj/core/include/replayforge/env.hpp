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

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "replayforge/common.hpp"
#include "replayforge/replay/buffer.hpp"

namespace rf {

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  bool success = false;
};

/// Episodic environment with a discrete action space.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual std::size_t observation_size() const = 0;
  virtual std::size_t action_count() const = 0;

  virtual std::vector<double> reset(Rng& rng) = 0;
  virtual StepResult step(std::size_t action, Rng& rng) = 0;

  /// 1 = legal. Empty means every action is legal.
  virtual std::vector<std::uint8_t> legal_mask() const { return {}; }

  /// Fidelity for compiling, energy error for QAS, return for the chain.
  virtual double task_metric() const = 0;

  /// Goal-conditioned environments expose goal/achieved vectors and a
  /// relabeling rule for hindsight replay.
  virtual bool goal_conditioned() const { return false; }
  virtual std::vector<float> goal_vector() const { return {}; }
  virtual std::vector<float> achieved_vector() const { return {}; }
  virtual replay::Transition relabel(const replay::Transition&, std::span<const float>) const {
    throw std::logic_error("environment is not goal-conditioned");
  }
};

}  // namespace rf
