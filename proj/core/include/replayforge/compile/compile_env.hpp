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

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "replayforge/env.hpp"
#include "replayforge/qcore/gates.hpp"
#include "replayforge/qcore/linalg.hpp"
#include "replayforge/replay/buffer.hpp"

namespace rf::compile {

enum class GateSet { SmallRotations1Q, HRC1Q, TwoQubit };
enum class RewardMode { Dense, Sparse };
enum class TargetMode {
  Haar,           // Haar-random unitary
  RandomCircuit,  // length ~ U{min..max}, gates drawn from the action basis
  Algorithm1,     // two-qubit basis walk of length ~ U{6..9999}
};

GateSet parse_gateset(const std::string& name);
RewardMode parse_reward_mode(const std::string& name);
TargetMode parse_target_mode(const std::string& name);

struct CompileConfig {
  int n_qubits = 1;
  GateSet gateset = GateSet::SmallRotations1Q;
  double tolerance = 0.99;
  int max_len = 130;
  RewardMode reward_mode = RewardMode::Dense;
  qcore::FidelityKind fidelity = qcore::FidelityKind::TraceAbs;
  TargetMode target_mode = TargetMode::Haar;
  std::size_t target_min_len = 1;
  std::size_t target_max_len = 20;

  void validate() const;
};

/// The discrete gate basis of a configuration.
std::vector<qcore::GateSpec> action_space(const CompileConfig& config);

/// Compiling MDP: U_{t+1} = U_t A, O_{t+1} = A^dagger O_t, observation =
/// real then imaginary parts of O_t (row-major).
class CompileEnv : public Environment {
 public:
  explicit CompileEnv(CompileConfig config);

  const CompileConfig& config() const { return cfg_; }
  std::string id() const override;
  std::size_t observation_size() const override;
  std::size_t action_count() const override { return actions_.size(); }
  const std::vector<qcore::GateSpec>& actions() const { return actions_; }
  const qcore::UnitaryMatrix& action_matrix(std::size_t a) const { return action_mats_.at(a); }

  qcore::UnitaryMatrix sample_target(Rng& rng) const;
  std::vector<double> reset(Rng& rng) override;
  std::vector<double> reset_with_target(const qcore::UnitaryMatrix& target);
  StepResult step(std::size_t action, Rng& rng) override;
  StepResult step(std::size_t action);

  double task_metric() const override { return fidelity(); }
  double fidelity() const;
  bool done() const { return done_; }
  bool success() const { return success_; }
  int t() const { return t_; }
  const qcore::UnitaryMatrix& target() const { return target_; }
  const qcore::UnitaryMatrix& accumulated() const { return u_; }
  const qcore::UnitaryMatrix& residual() const { return o_; }
  std::vector<double> observation() const { return o_.flatten_re_im(); }

  /// Reward of reaching `fid` at 1-based step t.
  double reward_for(double fid, int t) const;
  bool is_success(double fid) const;

  /// Goal-conditioned fields for HER: goal = flattened target, achieved =
  /// flattened U_{t+1}.
  bool goal_conditioned() const override { return true; }
  std::vector<float> goal_vector() const override;
  std::vector<float> achieved_vector() const override;

  /// Recompute a stored transition for a substitute goal unitary.
  replay::Transition relabel(const replay::Transition& t, std::span<const float> goal) const override;

 private:
  CompileConfig cfg_;
  std::vector<qcore::GateSpec> actions_;
  std::vector<qcore::UnitaryMatrix> action_mats_;
  qcore::UnitaryMatrix target_;
  qcore::UnitaryMatrix u_;
  qcore::UnitaryMatrix o_;
  int t_ = 0;
  bool done_ = true;
  bool success_ = false;
};

struct ToleranceResult {
  double tolerance = 0.0;
  std::size_t n_targets = 0;
  double success_rate = 0.0;
  double mean_fidelity = 0.0;
  double mean_len = 0.0;
  double std_len = 0.0;
};

using Policy = std::function<std::size_t(std::span<const double> observation)>;

/// Greedy rollouts of `policy` on n_targets sampled targets, once per
/// tolerance. Targets are shared across tolerances.
std::vector<ToleranceResult> evaluate(const CompileConfig& config, const Policy& policy, std::size_t n_targets,
                                      const std::vector<double>& tolerances, Rng& rng);

/// Same, on an explicit target list.
std::vector<ToleranceResult> evaluate_targets(const CompileConfig& config, const Policy& policy,
                                              const std::vector<qcore::UnitaryMatrix>& targets,
                                              const std::vector<double>& tolerances);

/// CSV: tolerance,n_targets,success_rate,mean_fidelity,mean_len,std_len,seed
void write_evaluation_csv(std::ostream& out, const std::vector<ToleranceResult>& results, std::uint64_t seed,
                          bool header = true);

}  // namespace rf::compile
