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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "replayforge/env.hpp"
#include "replayforge/qas/circuit_state.hpp"
#include "replayforge/qas/optimizer.hpp"
#include "replayforge/qcore/hamiltonian.hpp"
#include "replayforge/qcore/state.hpp"

namespace rf::qas {

inline constexpr double kChemicalAccuracy = 1.6e-3;

struct CurriculumConfig {
  double xi0 = 5.0;             // initial acceptance error
  double shift_ball = 0.001;
  int shift_time = 2000;        // episodes between time-based tightenings
  double success_switch = 5.0;  // ceiling applied when the success rule fires
  int success_threshold = 50;
  double margin = kChemicalAccuracy;
  double xi_min = 0.0;

  void validate() const;
};

/// Moving acceptance threshold. Every shift_time episodes xi drops by
/// shift_ball; after success_threshold successes xi snaps down to
/// min(xi, success_switch, max(best_error + margin, xi_min)). Never rises.
class Curriculum {
 public:
  explicit Curriculum(CurriculumConfig config);

  double xi() const { return xi_; }
  const CurriculumConfig& config() const { return cfg_; }
  std::int64_t episodes() const { return episodes_; }
  int success_count() const { return successes_; }

  void on_episode_end(bool success, double best_error);
  /// Force a tighter threshold (used to tighten a transferred curriculum).
  void tighten_to(double xi);

 private:
  CurriculumConfig cfg_;
  double xi_;
  std::int64_t episodes_ = 0;
  int successes_ = 0;
};

struct QasConfig {
  std::string name = "qas";
  int n_qubits = 3;
  int max_layers = 20;
  Encoding encoding = Encoding::I;
  qcore::PauliSumHamiltonian hamiltonian;
  int m = 1;          // evaluate every m steps and at episode end
  int max_steps = 20;  // T_s
  std::optional<double> c_min;             // default -sum |c_k|
  std::optional<double> reference_energy;  // default exact diagonalization
  std::optional<qcore::NoiseModel> noise;
  int trajectories = 256;  // noisy registers above 6 qubits
  VqeOptimizerConfig optimizer;
  CurriculumConfig curriculum;

  void validate() const;
};

/// Evaluation of <H> for a bound circuit: statevector when noiseless,
/// density matrix up to 6 qubits under noise, Pauli trajectories beyond.
class CostEvaluator {
 public:
  CostEvaluator(const qcore::PauliSumHamiltonian& h, std::optional<qcore::NoiseModel> noise, int trajectories,
                std::uint64_t seed);
  double operator()(const qcore::Circuit& circuit);
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

 private:
  const qcore::PauliSumHamiltonian* h_;
  std::optional<qcore::NoiseModel> noise_;
  int trajectories_;
  Rng rng_;
};

struct QasStepResult : StepResult {
  bool evaluated = false;
};

struct EpisodeStats {
  int steps = 0;
  int evaluations = 0;
  double best_cost = 0.0;
  double min_error = 0.0;
  int total_gates = 0;
  int cnot_count = 0;  // two-qubit gates
  int rot_count = 0;
  bool success = false;
};

/// Gate counts from a tensor state.
EpisodeStats count_gates(const CircuitTensorState& state);

/// Evaluation-step reward: +5 below the threshold, -5 at a failed terminal
/// step, otherwise the normalized improvement clamped to [-1, 1].
double qas_reward(double previous_cost, double cost, double c_min, double threshold, bool terminal);

/// True when step t (1-based) of an episode triggers an evaluation.
inline bool evaluation_due(int t, int m, bool terminal) { return terminal || t % m == 0; }

/// Architecture-search MDP with amortized evaluation every m edits.
class QasEnv : public Environment {
 public:
  explicit QasEnv(QasConfig config);
  QasEnv(const QasEnv&) = delete;
  QasEnv& operator=(const QasEnv&) = delete;

  const QasConfig& config() const { return cfg_; }
  std::string id() const override { return cfg_.name; }
  std::size_t observation_size() const override;
  std::size_t action_count() const override { return actions_.size(); }
  const std::vector<GateAction>& actions() const { return actions_; }

  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::size_t action, Rng& rng) override;
  QasStepResult step_amortized(std::size_t action);
  std::vector<std::uint8_t> legal_mask() const override;

  /// Best error vs the reference energy seen this episode.
  double task_metric() const override { return best_cost_ - reference_energy_; }

  const CircuitTensorState& state() const { return state_; }
  const std::vector<double>& thetas() const { return thetas_; }
  double current_cost() const { return cost_; }
  double reference_energy() const { return reference_energy_; }
  double c_min() const { return c_min_; }
  double threshold() const { return reference_energy_ + curriculum_.xi(); }
  Curriculum& curriculum() { return curriculum_; }
  const Curriculum& curriculum() const { return curriculum_; }
  bool done() const { return done_; }
  int t() const { return t_; }
  EpisodeStats episode_stats() const;
  std::int64_t total_evaluations() const { return total_evals_; }
  std::size_t total_cost_calls() const { return cost_calls_; }

  /// Reward of an evaluation step.
  double reward(double previous_cost, double cost, bool terminal) const;

  /// Optimize the current circuit's angles (warm-started) and return the
  /// cost; does not count as an episode evaluation.
  OptimizeResult optimize_current();

  std::vector<double> observation() const;

 private:
  void evaluate_now();

  QasConfig cfg_;
  std::vector<GateAction> actions_;
  CircuitTensorState state_;
  CostEvaluator evaluator_;
  Curriculum curriculum_;
  double reference_energy_ = 0.0;
  double c_min_ = 0.0;
  double empty_cost_ = 0.0;

  std::vector<double> thetas_;  // placement order
  double cost_ = 0.0;
  double best_cost_ = 0.0;
  int t_ = 0;
  int evals_ = 0;
  bool done_ = true;
  bool success_ = false;
  std::int64_t total_evals_ = 0;
  std::size_t cost_calls_ = 0;
};

struct QasEpisodeRow {
  std::int64_t episode = 0;
  int steps = 0;
  int evals = 0;
  double best_cost = 0.0;
  double error_vs_exact = 0.0;
  int total_gates = 0;
  int cnot = 0;
  int rot = 0;
  double xi = 0.0;
  double epsilon = 0.0;
  double wall_ms = 0.0;
};

void write_qas_header(std::ostream& out);
void write_qas_row(std::ostream& out, const QasEpisodeRow& row);

}  // namespace rf::qas
