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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rf::replay {

enum class Strategy : std::uint8_t { Uniform = 0, HER = 1, PER = 2, ReaPER = 3, ReaPERPlus = 4 };

std::string_view strategy_name(Strategy s);
/// Accepts uniform, her, per, reaper, reaper_plus (case-insensitive).
Strategy parse_strategy(std::string_view name);
bool is_prioritized(Strategy s);

struct PrioritySpec {
  double alpha = 0.6;
  double omega = 0.2;  // fixed exponent for ReaPER
  double beta0 = 0.4;
  std::int64_t beta_anneal_frames = 100000;
  double epsilon_priority = 1e-6;

  void validate() const;
};

struct OmegaSchedule {
  double omega_min = 0.1;
  double omega_max = 0.7;
  std::int64_t t_ann = 500000;

  void validate() const;
};

/// omega_min + (omega_max - omega_min) * min(tau / t_ann, 1).
double omega_at(const OmegaSchedule& schedule, std::int64_t tau);

/// Y = r + gamma (1 - done) max_next_q.
double td_target(double reward, bool done, double gamma, double max_next_q);

/// R_t = 1 - sum_{i>t} d_i / sum_i d_i, all ones when the total is zero.
std::vector<double> reliability_scores(std::span<const double> td_plus);

/// Unnormalized priority of one transition. `td_plus` is the raw |delta|;
/// epsilon_priority is added here.
double priority_value(Strategy s, double td_plus, double reliability, const PrioritySpec& spec,
                      double omega_now);

struct PriorityResult {
  std::vector<double> psi;
  std::vector<double> mu;
};

PriorityResult priorities(Strategy s, std::span<const double> td_plus,
                          std::span<const double> reliability, const PrioritySpec& spec,
                          double omega_now);

/// beta0 annealed linearly to 1 over beta_anneal_frames.
double beta_at(const PrioritySpec& spec, std::int64_t frame);

}  // namespace rf::replay
