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

#include "replayforge/compile/compile_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "replayforge/qcore/sampling.hpp"

namespace rf::compile {

using qcore::CMatrix;
using qcore::GateKind;
using qcore::GateSpec;
using qcore::UnitaryMatrix;

GateSet parse_gateset(const std::string& name) {
  if (name == "small_rotations_1q" || name == "smallrot") return GateSet::SmallRotations1Q;
  if (name == "hrc_1q" || name == "hrc") return GateSet::HRC1Q;
  if (name == "two_qubit" || name == "2q") return GateSet::TwoQubit;
  throw ConfigError("unknown gateset: " + name);
}

RewardMode parse_reward_mode(const std::string& name) {
  if (name == "dense") return RewardMode::Dense;
  if (name == "sparse") return RewardMode::Sparse;
  throw ConfigError("unknown reward mode: " + name);
}

TargetMode parse_target_mode(const std::string& name) {
  if (name == "haar") return TargetMode::Haar;
  if (name == "random_circuit") return TargetMode::RandomCircuit;
  if (name == "algorithm1") return TargetMode::Algorithm1;
  throw ConfigError("unknown target mode: " + name);
}

void CompileConfig::validate() const {
  if (n_qubits != 1 && n_qubits != 2) throw ConfigError("compile env supports 1 or 2 qubits");
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw ConfigError("tolerance must be in (0,1)");
  if (max_len <= 0) throw ConfigError("max_len must be positive");
  const bool two = gateset == GateSet::TwoQubit;
  if (two != (n_qubits == 2)) throw ConfigError("gateset does not match qubit count");
  if (target_mode == TargetMode::Algorithm1 && n_qubits != 2) throw ConfigError("algorithm1 targets are two-qubit");
  if (target_mode == TargetMode::RandomCircuit && (target_min_len > target_max_len))
    throw ConfigError("target_min_len exceeds target_max_len");
}

std::vector<GateSpec> action_space(const CompileConfig& config) {
  constexpr double kStep = std::numbers::pi / 128.0;
  switch (config.gateset) {
    case GateSet::SmallRotations1Q: {
      std::vector<GateSpec> out;
      for (GateKind k : {GateKind::RX, GateKind::RY, GateKind::RZ}) {
        out.push_back(GateSpec::one(k, 0, kStep));
        out.push_back(GateSpec::one(k, 0, -kStep));
      }
      return out;
    }
    case GateSet::HRC1Q:
      return {GateSpec::one(GateKind::V1, 0), GateSpec::one(GateKind::V2, 0), GateSpec::one(GateKind::V3, 0)};
    case GateSet::TwoQubit:
      return qcore::two_qubit_compiling_basis();
  }
  throw ConfigError("unknown gateset");
}

CompileEnv::CompileEnv(CompileConfig config)
    : cfg_((config.validate(), config)),
      actions_(action_space(cfg_)),
      target_(UnitaryMatrix::identity(cfg_.n_qubits)),
      u_(UnitaryMatrix::identity(cfg_.n_qubits)),
      o_(UnitaryMatrix::identity(cfg_.n_qubits)) {
  action_mats_.reserve(actions_.size());
  for (const auto& g : actions_) action_mats_.push_back(qcore::gate_matrix(g, cfg_.n_qubits));
}

std::string CompileEnv::id() const {
  switch (cfg_.gateset) {
    case GateSet::SmallRotations1Q: return "compile_1q_smallrot";
    case GateSet::HRC1Q: return "compile_1q_hrc";
    case GateSet::TwoQubit: return "compile_2q";
  }
  return "compile";
}

std::size_t CompileEnv::observation_size() const {
  const std::size_t d = std::size_t{1} << cfg_.n_qubits;
  return 2 * d * d;
}

UnitaryMatrix CompileEnv::sample_target(Rng& rng) const {
  switch (cfg_.target_mode) {
    case TargetMode::Haar: return qcore::haar_random(cfg_.n_qubits, rng);
    case TargetMode::RandomCircuit:
      return qcore::random_circuit_target(actions_, cfg_.n_qubits, cfg_.target_min_len, cfg_.target_max_len, rng);
    case TargetMode::Algorithm1: return qcore::random_2q_target(rng);
  }
  throw ConfigError("unknown target mode");
}

std::vector<double> CompileEnv::reset(Rng& rng) { return reset_with_target(sample_target(rng)); }

std::vector<double> CompileEnv::reset_with_target(const UnitaryMatrix& target) {
  if (target.n_qubits() != cfg_.n_qubits) throw ConfigError("target dimension does not match the environment");
  target_ = target;
  u_ = UnitaryMatrix::identity(cfg_.n_qubits);
  o_ = target;
  t_ = 0;
  done_ = false;
  success_ = false;
  return observation();
}

double CompileEnv::fidelity() const { return qcore::fidelity(u_, target_, cfg_.fidelity); }

bool CompileEnv::is_success(double fid) const { return 1.0 - fid < 1.0 - cfg_.tolerance; }

double CompileEnv::reward_for(double fid, int t) const {
  const double len = cfg_.max_len;
  if (cfg_.reward_mode == RewardMode::Dense) {
    if (is_success(fid)) return (len - t) + 1.0;
    return -(1.0 - fid) / len;
  }
  return is_success(fid) ? 0.0 : -1.0 / len;
}

StepResult CompileEnv::step(std::size_t action, Rng&) { return step(action); }

StepResult CompileEnv::step(std::size_t action) {
  if (done_) throw std::logic_error("step on a finished episode");
  if (action >= actions_.size()) throw std::out_of_range("action index out of range");
  const UnitaryMatrix& a = action_mats_[action];
  u_ = u_ * a;
  o_ = a.adjoint() * o_;
  ++t_;
  const double fid = fidelity();
  success_ = is_success(fid);
  done_ = success_ || t_ >= cfg_.max_len;
  return StepResult{observation(), reward_for(fid, t_), done_, success_};
}

namespace {
std::vector<float> to_float(const std::vector<double>& v) { return {v.begin(), v.end()}; }

CMatrix from_flat(std::span<const float> flat) {
  const std::size_t cells = flat.size() / 2;
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(cells))));
  if (flat.size() % 2 != 0 || static_cast<std::size_t>(d * d) != cells) {
    throw std::invalid_argument("flattened matrix has a bad length");
  }
  CMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto k = static_cast<std::size_t>(r * d + c);
      m(r, c) = {flat[k], flat[cells + k]};
    }
  return m;
}

std::vector<float> flatten(const CMatrix& m) {
  const auto cells = static_cast<std::size_t>(m.size());
  std::vector<float> out(2 * cells);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto k = static_cast<std::size_t>(r * m.cols() + c);
      out[k] = static_cast<float>(m(r, c).real());
      out[cells + k] = static_cast<float>(m(r, c).imag());
    }
  return out;
}
}  // namespace

std::vector<float> CompileEnv::goal_vector() const { return to_float(target_.flatten_re_im()); }
std::vector<float> CompileEnv::achieved_vector() const { return to_float(u_.flatten_re_im()); }

replay::Transition CompileEnv::relabel(const replay::Transition& t, std::span<const float> goal) const {
  if (t.achieved.empty()) throw std::invalid_argument("transition has no achieved state");
  if (t.action >= actions_.size()) throw std::out_of_range("action index out of range");
  const CMatrix g = from_flat(goal);
  const CMatrix u_next = from_flat(t.achieved);
  if (g.rows() != u_next.rows() || g.rows() != static_cast<Eigen::Index>(std::size_t{1} << cfg_.n_qubits)) {
    throw std::invalid_argument("goal dimension mismatch");
  }
  const CMatrix o_next = u_next.adjoint() * g;
  const CMatrix o_prev = action_mats_[t.action].matrix() * o_next;
  double fid = std::abs(o_next.trace()) / static_cast<double>(g.rows());
  if (cfg_.fidelity == qcore::FidelityKind::TraceSquared) fid *= fid;
  fid = std::min(fid, 1.0);
  const int step_no = static_cast<int>(t.step);

  replay::Transition out = t;
  out.state = flatten(o_prev);
  out.next_state = flatten(o_next);
  out.goal.assign(goal.begin(), goal.end());
  out.reward = static_cast<float>(reward_for(fid, step_no));
  out.done = is_success(fid) || step_no >= cfg_.max_len;
  return out;
}

std::vector<ToleranceResult> evaluate_targets(const CompileConfig& config, const Policy& policy,
                                              const std::vector<UnitaryMatrix>& targets,
                                              const std::vector<double>& tolerances) {
  std::vector<ToleranceResult> out;
  out.reserve(tolerances.size());
  for (double tol : tolerances) {
    CompileConfig c = config;
    c.tolerance = tol;
    CompileEnv env(c);
    ToleranceResult r;
    r.tolerance = tol;
    r.n_targets = targets.size();
    double sum_len = 0.0, sum_len2 = 0.0, sum_f = 0.0;
    std::size_t wins = 0;
    for (const auto& target : targets) {
      std::vector<double> obs = env.reset_with_target(target);
      while (!env.done()) obs = env.step(policy(obs)).observation;
      if (env.success()) ++wins;
      sum_f += env.fidelity();
      sum_len += env.t();
      sum_len2 += static_cast<double>(env.t()) * env.t();
    }
    if (!targets.empty()) {
      const auto n = static_cast<double>(targets.size());
      r.success_rate = static_cast<double>(wins) / n;
      r.mean_fidelity = sum_f / n;
      r.mean_len = sum_len / n;
      r.std_len = std::sqrt(std::max(0.0, sum_len2 / n - r.mean_len * r.mean_len));
    }
    out.push_back(r);
  }
  return out;
}

std::vector<ToleranceResult> evaluate(const CompileConfig& config, const Policy& policy, std::size_t n_targets,
                                      const std::vector<double>& tolerances, Rng& rng) {
  CompileEnv sampler(config);
  std::vector<UnitaryMatrix> targets;
  targets.reserve(n_targets);
  for (std::size_t i = 0; i < n_targets; ++i) targets.push_back(sampler.sample_target(rng));
  return evaluate_targets(config, policy, targets, tolerances);
}

void write_evaluation_csv(std::ostream& out, const std::vector<ToleranceResult>& results, std::uint64_t seed,
                          bool header) {
  if (header) out << "tolerance,n_targets,success_rate,mean_fidelity,mean_len,std_len,seed\n";
  for (const auto& r : results) {
    out << r.tolerance << ',' << r.n_targets << ',' << r.success_rate << ',' << r.mean_fidelity << ','
        << r.mean_len << ',' << r.std_len << ',' << seed << '\n';
  }
}

}  // namespace rf::compile
