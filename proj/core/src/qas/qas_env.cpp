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

#include "replayforge/qas/qas_env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rf::qas {

void CurriculumConfig::validate() const {
  if (!(shift_ball > 0.0)) throw ConfigError("curriculum shift_ball must be positive");
  if (shift_time < 1) throw ConfigError("curriculum shift_time must be >= 1");
  if (success_threshold < 1) throw ConfigError("curriculum success_threshold must be >= 1");
  if (!(xi0 > 0.0)) throw ConfigError("curriculum xi0 must be positive");
}

Curriculum::Curriculum(CurriculumConfig config) : cfg_((config.validate(), config)), xi_(cfg_.xi0) {}

void Curriculum::on_episode_end(bool success, double best_error) {
  ++episodes_;
  if (success && ++successes_ >= cfg_.success_threshold) {
    const double snap = std::min(cfg_.success_switch, std::max(best_error + cfg_.margin, cfg_.xi_min));
    xi_ = std::min(xi_, snap);
    successes_ = 0;
  }
  if (episodes_ % cfg_.shift_time == 0) xi_ = std::min(xi_, std::max(xi_ - cfg_.shift_ball, cfg_.xi_min));
}

void Curriculum::tighten_to(double xi) { xi_ = std::min(xi_, xi); }

void QasConfig::validate() const {
  if (n_qubits < 1) throw ConfigError("n_qubits must be >= 1");
  if (hamiltonian.n_qubits() != n_qubits) throw ConfigError("hamiltonian qubit count does not match n_qubits");
  if (max_layers < 1) throw ConfigError("max_layers must be >= 1");
  if (m < 1) throw ConfigError("amortization interval m must be >= 1");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (trajectories < 1) throw ConfigError("trajectories must be >= 1");
  if (noise && (noise->p1 < 0.0 || noise->p1 > 1.0 || noise->p2 < 0.0 || noise->p2 > 1.0)) {
    throw ConfigError("noise probabilities must lie in [0,1]");
  }
  optimizer.validate();
  curriculum.validate();
}

CostEvaluator::CostEvaluator(const qcore::PauliSumHamiltonian& h, std::optional<qcore::NoiseModel> noise,
                             int trajectories, std::uint64_t seed)
    : h_(&h), noise_(noise), trajectories_(trajectories), rng_(seed) {
  if (noise_ && noise_->is_noiseless()) noise_.reset();
}

double CostEvaluator::operator()(const qcore::Circuit& circuit) {
  const int n = h_->n_qubits();
  if (!noise_) return qcore::expectation(*h_, qcore::simulate(circuit, n));
  if (n <= 6) return qcore::expectation(*h_, qcore::simulate_noisy(circuit, n, *noise_));
  return qcore::trajectory_expectation(circuit, n, *noise_, *h_, trajectories_, rng_);
}

EpisodeStats count_gates(const CircuitTensorState& state) {
  EpisodeStats s;
  for (const auto& p : state.placements()) {
    if (p.two_qubit()) ++s.cnot_count;
    else ++s.rot_count;
  }
  s.total_gates = s.cnot_count + s.rot_count;
  return s;
}

namespace {
QasConfig checked(QasConfig c) {
  c.validate();
  return c;
}
}  // namespace

QasEnv::QasEnv(QasConfig config)
    : cfg_(checked(std::move(config))),
      actions_(action_table(cfg_.n_qubits, cfg_.encoding)),
      state_(cfg_.n_qubits, cfg_.max_layers, cfg_.encoding),
      evaluator_(cfg_.hamiltonian, cfg_.noise, cfg_.trajectories, 0),
      curriculum_(cfg_.curriculum) {
  reference_energy_ = cfg_.reference_energy ? *cfg_.reference_energy : qcore::exact_ground_energy(cfg_.hamiltonian);
  c_min_ = cfg_.c_min ? *cfg_.c_min : cfg_.hamiltonian.coefficient_lower_bound();
  if (c_min_ > reference_energy_ + 1e-9) throw ConfigError("c_min must not exceed the ground energy");
  empty_cost_ = evaluator_({});
  cost_ = best_cost_ = empty_cost_;
}

std::size_t QasEnv::observation_size() const { return state_.tensor().size() + 1; }

std::vector<double> QasEnv::observation() const {
  std::vector<double> obs = state_.tensor();
  obs.push_back(cost_);
  return obs;
}

std::vector<double> QasEnv::reset(Rng& rng) {
  evaluator_.reseed(rng());
  state_.clear();
  thetas_.clear();
  cost_ = best_cost_ = evaluator_({});
  t_ = 0;
  evals_ = 0;
  done_ = false;
  success_ = false;
  return observation();
}

std::vector<std::uint8_t> QasEnv::legal_mask() const {
  std::vector<std::uint8_t> mask(actions_.size());
  for (std::size_t i = 0; i < actions_.size(); ++i) mask[i] = state_.fits(actions_[i].q0, actions_[i].q1) ? 1 : 0;
  return mask;
}

double qas_reward(double previous_cost, double cost, double c_min, double threshold, bool terminal) {
  if (cost < threshold) return 5.0;
  if (terminal) return -5.0;
  const double den = previous_cost - c_min;
  if (!(den > 0.0)) return 0.0;
  return std::clamp((previous_cost - cost) / den, -1.0, 1.0);
}

double QasEnv::reward(double previous_cost, double cost, bool terminal) const {
  return qas_reward(previous_cost, cost, c_min_, threshold(), terminal);
}

OptimizeResult QasEnv::optimize_current() {
  std::vector<double> theta0 = thetas_;
  if (!cfg_.optimizer.warm_start) std::fill(theta0.begin(), theta0.end(), 0.0);
  const CostFunction f = [this](std::span<const double> th) { return evaluator_(state_.build_circuit(th)); };
  OptimizeResult r = minimize(f, std::move(theta0), cfg_.optimizer);
  cost_calls_ += r.cost_calls;
  thetas_ = r.thetas;
  return r;
}

StepResult QasEnv::step(std::size_t action, Rng&) { return step_amortized(action); }

QasStepResult QasEnv::step_amortized(std::size_t action) {
  if (done_) throw std::logic_error("step on a finished episode");
  if (action >= actions_.size()) throw std::out_of_range("action index out of range");
  const GateAction& a = actions_[action];
  if (!state_.fits(a.q0, a.q1)) throw std::invalid_argument("action exceeds the layer budget");
  if (cfg_.encoding == Encoding::I) {
    state_.encode_action_I(to_tuple_I(a, cfg_.n_qubits));
  } else {
    state_.encode_action_II(to_tuple_II(a, cfg_.n_qubits));
  }
  if (qcore::gate_is_parameterized(a.kind)) thetas_.push_back(0.0);
  ++t_;

  const std::vector<std::uint8_t> mask = legal_mask();
  const bool stuck = std::none_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; });
  const bool terminal = t_ >= cfg_.max_steps || stuck;

  QasStepResult out;
  if (evaluation_due(t_, cfg_.m, terminal)) {
    const double previous = cost_;
    cost_ = optimize_current().cost;
    ++evals_;
    ++total_evals_;
    best_cost_ = std::min(best_cost_, cost_);
    success_ = cost_ < threshold();
    out.reward = reward(previous, cost_, terminal);
    out.done = success_ || terminal;
    out.evaluated = true;
  }
  out.success = success_;
  done_ = out.done;
  if (done_) curriculum_.on_episode_end(success_, best_cost_ - reference_energy_);
  out.observation = observation();
  return out;
}

EpisodeStats QasEnv::episode_stats() const {
  EpisodeStats s = count_gates(state_);
  s.steps = t_;
  s.evaluations = evals_;
  s.best_cost = best_cost_;
  s.min_error = best_cost_ - reference_energy_;
  s.success = success_;
  return s;
}

void write_qas_header(std::ostream& out) {
  out << "episode,steps,evals,best_cost,error_vs_exact,total_gates,cnot,rot,xi,epsilon,wall_ms\n";
}

void write_qas_row(std::ostream& out, const QasEpisodeRow& r) {
  out << r.episode << ',' << r.steps << ',' << r.evals << ',' << r.best_cost << ',' << r.error_vs_exact << ','
      << r.total_gates << ',' << r.cnot << ',' << r.rot << ',' << r.xi << ',' << r.epsilon << ',' << r.wall_ms
      << '\n';
}

}  // namespace rf::qas
