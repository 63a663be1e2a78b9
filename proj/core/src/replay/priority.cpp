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

#include "replayforge/replay/priority.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace rf::replay {

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Uniform: return "uniform";
    case Strategy::HER: return "her";
    case Strategy::PER: return "per";
    case Strategy::ReaPER: return "reaper";
    case Strategy::ReaPERPlus: return "reaper_plus";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "uniform") return Strategy::Uniform;
  if (lower == "her") return Strategy::HER;
  if (lower == "per") return Strategy::PER;
  if (lower == "reaper") return Strategy::ReaPER;
  if (lower == "reaper_plus" || lower == "reaper+" || lower == "reaperplus") return Strategy::ReaPERPlus;
  throw std::invalid_argument("unknown replay strategy '" + std::string(name) + "'");
}

bool is_prioritized(Strategy s) {
  return s == Strategy::PER || s == Strategy::ReaPER || s == Strategy::ReaPERPlus;
}

void PrioritySpec::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  if (!std::isfinite(omega) || omega < 0.0 || omega > 1.0) throw std::invalid_argument("omega must be in [0,1]");
  if (!std::isfinite(beta0) || beta0 < 0.0 || beta0 > 1.0) throw std::invalid_argument("beta0 must be in [0,1]");
  if (beta_anneal_frames < 0) throw std::invalid_argument("beta_anneal_frames must be >= 0");
  if (!std::isfinite(epsilon_priority) || epsilon_priority <= 0.0) {
    throw std::invalid_argument("epsilon_priority must be > 0");
  }
}

void OmegaSchedule::validate() const {
  if (!(0.0 <= omega_min && omega_min <= omega_max && omega_max <= 1.0)) {
    throw std::invalid_argument("omega schedule needs 0 <= omega_min <= omega_max <= 1");
  }
  if (t_ann <= 0) throw std::invalid_argument("t_ann must be positive");
}

double omega_at(const OmegaSchedule& schedule, std::int64_t tau) {
  const double frac =
      std::min(static_cast<double>(std::max<std::int64_t>(tau, 0)) / static_cast<double>(schedule.t_ann), 1.0);
  return schedule.omega_min + (schedule.omega_max - schedule.omega_min) * frac;
}

double td_target(double reward, bool done, double gamma, double max_next_q) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
  return done ? reward : reward + gamma * max_next_q;
}

std::vector<double> reliability_scores(std::span<const double> td_plus) {
  double total = 0.0;
  for (double d : td_plus) {
    if (std::isnan(d)) throw std::invalid_argument("NaN TD error");
    if (d < 0.0) throw std::invalid_argument("negative TD magnitude");
    total += d;
  }
  std::vector<double> r(td_plus.size(), 1.0);
  if (total <= 0.0) return r;
  // Suffix sums from the back keep R_n exactly 1.
  double after = 0.0;
  for (std::size_t t = td_plus.size(); t-- > 0;) {
    r[t] = 1.0 - after / total;
    after += td_plus[t];
  }
  return r;
}

double priority_value(Strategy s, double td_plus, double reliability, const PrioritySpec& spec,
                      double omega_now) {
  const double base = std::pow(td_plus + spec.epsilon_priority, spec.alpha);
  switch (s) {
    case Strategy::Uniform:
    case Strategy::HER: return 1.0;
    case Strategy::PER: return base;
    case Strategy::ReaPER: return std::pow(reliability, spec.omega) * base;
    case Strategy::ReaPERPlus: return std::pow(reliability, omega_now) * base;
  }
  return 1.0;
}

PriorityResult priorities(Strategy s, std::span<const double> td_plus,
                          std::span<const double> reliability, const PrioritySpec& spec,
                          double omega_now) {
  if (td_plus.empty()) throw std::invalid_argument("empty priority input");
  if (td_plus.size() != reliability.size()) throw std::invalid_argument("length mismatch");
  PriorityResult out;
  out.psi.resize(td_plus.size());
  double total = 0.0;
  for (std::size_t i = 0; i < td_plus.size(); ++i) {
    if (!(td_plus[i] >= 0.0) || !(reliability[i] >= 0.0)) throw std::invalid_argument("negative or NaN input");
    out.psi[i] = priority_value(s, td_plus[i], reliability[i], spec, omega_now);
    total += out.psi[i];
  }
  out.mu.resize(out.psi.size());
  for (std::size_t i = 0; i < out.psi.size(); ++i) out.mu[i] = out.psi[i] / total;
  return out;
}

double beta_at(const PrioritySpec& spec, std::int64_t frame) {
  if (spec.beta_anneal_frames <= 0) return 1.0;
  const double frac = std::min(static_cast<double>(frame) / static_cast<double>(spec.beta_anneal_frames), 1.0);
  return spec.beta0 + (1.0 - spec.beta0) * frac;
}

}  // namespace rf::replay
