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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "replayforge/qas/circuit_state.hpp"
#include "replayforge/qas/optimizer.hpp"
#include "replayforge/qas/qas_env.hpp"
#include "replayforge/qcore/hamiltonian.hpp"

using namespace rf::qas;
using rf::qcore::GateKind;
using rf::qcore::GateSpec;
using rf::qcore::PauliSumHamiltonian;

namespace {

std::size_t nonzeros(const CircuitTensorState& s) {
  std::size_t k = 0;
  for (double v : s.tensor()) k += v != 0.0 ? 1 : 0;
  return k;
}

PauliSumHamiltonian single_z() { return PauliSumHamiltonian(1, {{1.0, "Z"}}); }

QasConfig heis_config(int n, int m, int max_steps) {
  QasConfig c;
  c.n_qubits = n;
  c.max_layers = max_steps;
  c.hamiltonian = rf::qcore::heisenberg_hamiltonian(n);
  c.m = m;
  c.max_steps = max_steps;
  c.optimizer.max_iter = 30;
  c.curriculum.xi0 = 1e-9;
  return c;
}

}  // namespace

TEST(Encoding, DoubleSentinelIsNoop) {
  CircuitTensorState s(3, 5, Encoding::I);
  s.encode_action_I({3, 0, 3, 1});
  EXPECT_EQ(nonzeros(s), 0u);
  EXPECT_EQ(s.moments(), (std::vector<int>{0, 0, 0}));
}

TEST(Encoding, CnotPlusRotationWrites) {
  CircuitTensorState s(3, 5, Encoding::I);
  s.encode_action_I({0, 1, 2, 3});
  EXPECT_EQ(s.at(0, 1, 0), 1.0);  // S[l][target][control]
  EXPECT_EQ(s.at(0, 3 + 3 - 1, 2), 1.0);
  EXPECT_EQ(nonzeros(s), 2u);
  EXPECT_EQ(s.moments(), (std::vector<int>{1, 1, 1}));
  ASSERT_EQ(s.placements().size(), 2u);
  EXPECT_EQ(s.placements()[0].kind, GateKind::CNOT);
  EXPECT_EQ(s.placements()[1].kind, GateKind::RZ);
}

TEST(Encoding, MomentsAreCausal) {
  std::mt19937_64 rng(3);
  for (Encoding enc : {Encoding::I, Encoding::II}) {
    CircuitTensorState s(4, 200, enc);
    const auto table = action_table(4, enc);
    std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
    std::vector<int> last(4, -1);
    for (int i = 0; i < 150; ++i) {
      const auto& a = table[pick(rng)];
      if (!s.fits(a.q0, a.q1)) break;
      s.place(a.kind, a.q0, a.q1);
      const Placement& p = s.placements().back();
      for (int q : {a.q0, a.q1}) {
        if (q < 0) continue;
        EXPECT_GT(p.layer, last[static_cast<std::size_t>(q)]);
        last[static_cast<std::size_t>(q)] = p.layer;
      }
    }
  }
}

TEST(Encoding, SameQubitGatesAdvance) {
  CircuitTensorState s(2, 4, Encoding::I);
  s.encode_action_I({2, 0, 0, 1});
  s.encode_action_I({2, 0, 0, 2});
  EXPECT_EQ(s.placements()[0].layer, 0);
  EXPECT_EQ(s.placements()[1].layer, 1);
}

TEST(Encoding, LayerBudgetEnforced) {
  CircuitTensorState s(1, 2, Encoding::I);
  s.encode_action_I({1, 0, 0, 1});
  s.encode_action_I({1, 0, 0, 1});
  EXPECT_FALSE(s.fits(0));
  EXPECT_THROW(s.encode_action_I({1, 0, 0, 1}), std::length_error);
  EXPECT_EQ(s.placements().size(), 2u);
  EXPECT_THROW(s.encode_action_I({2, 0, 0, 1}), std::invalid_argument);
}

TEST(Encoding, IntegerLabelsForTwoQubitKinds) {
  CircuitTensorState s(3, 5, Encoding::II);
  s.encode_action_II({3, 0, 3, 0, 3, 0, 3, 1});
  EXPECT_EQ(nonzeros(s), 0u);
  s.encode_action_II({3, 0, 1, 1, 3, 0, 3, 1});  // RYY control 1, target 2
  EXPECT_EQ(s.at(0, 2, 1), 2.0);
  s.encode_action_II({0, 1, 3, 0, 3, 0, 3, 1});
  EXPECT_EQ(s.at(1, 1, 0), 1.0);
  s.encode_action_II({3, 0, 3, 0, 0, 2, 3, 1});
  EXPECT_EQ(s.at(2, 2, 0), 3.0);
  for (double v : s.tensor()) EXPECT_TRUE(v == 0.0 || v == 1.0 || v == 2.0 || v == 3.0);
  EXPECT_THROW(s.place(GateKind::CNOT, 0, 1), std::invalid_argument);
}

TEST(Encoding, ConnectivityFootprintIndependentOfKinds) {
  const CircuitTensorState one(4, 10, Encoding::I);
  const CircuitTensorState two(4, 10, Encoding::II);
  EXPECT_EQ(one.tensor().size(), two.tensor().size());
  EXPECT_EQ(one.rows(), 4 + 3);
}

TEST(Encoding, CircuitRoundTrip) {
  std::mt19937_64 rng(5);
  for (Encoding enc : {Encoding::I, Encoding::II}) {
    for (int trial = 0; trial < 20; ++trial) {
      CircuitTensorState s(3, 12, enc);
      const auto table = action_table(3, enc);
      std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
      for (int i = 0; i < 25; ++i) {
        const auto& a = table[pick(rng)];
        if (s.fits(a.q0, a.q1)) s.place(a.kind, a.q0, a.q1);
      }
      std::vector<double> th(s.parameter_count(), 0.25);
      const auto circuit = s.build_circuit(th);
      const auto back = CircuitTensorState::from_circuit(circuit, 3, 12, enc);
      EXPECT_EQ(back.tensor(), s.tensor());
      EXPECT_EQ(back.moments(), s.moments());
    }
  }
}

TEST(Encoding, ActionTableSizes) {
  EXPECT_EQ(action_table(3, Encoding::I).size(), 3u * 2 + 9);
  EXPECT_EQ(action_table(3, Encoding::II).size(), 3u * 3 * 2 + 9);
  EXPECT_EQ(action_table(1, Encoding::I).size(), 3u);
}

TEST(BuildCircuit, EmptyAndThetaMismatch) {
  CircuitTensorState s(2, 3, Encoding::I);
  EXPECT_TRUE(s.build_circuit({}).empty());
  s.place(GateKind::RX, 0);
  EXPECT_THROW(s.build_circuit({}), std::invalid_argument);
}

TEST(BuildCircuit, SingleRxOnZ) {
  const auto h = single_z();
  CircuitTensorState s(1, 2, Encoding::I);
  s.place(GateKind::RX, 0);
  CostEvaluator eval(h, std::nullopt, 1, 0);
  for (double th : {0.0, 0.4, 1.3, 2.9, -2.0}) {
    const std::vector<double> v{th};
    EXPECT_NEAR(eval(s.build_circuit(v)), std::cos(th), 1e-12);
  }
}

TEST(BuildCircuit, AnglesFollowPlacementOrder) {
  CircuitTensorState s(2, 4, Encoding::I);
  s.place(GateKind::RX, 1);  // layer 0
  s.place(GateKind::RY, 1);  // layer 1
  s.place(GateKind::RZ, 0);  // layer 0
  const std::vector<double> th{0.1, 0.2, 0.3};
  const auto c = s.build_circuit(th);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], GateSpec::one(GateKind::RZ, 0, 0.3));
  EXPECT_EQ(c[1], GateSpec::one(GateKind::RX, 1, 0.1));
  EXPECT_EQ(c[2], GateSpec::one(GateKind::RY, 1, 0.2));
}

TEST(Optimizer, RxOnZReachesMinusOne) {
  const auto h = single_z();
  CircuitTensorState s(1, 2, Encoding::I);
  s.place(GateKind::RX, 0);
  CostEvaluator eval(h, std::nullopt, 1, 0);
  const CostFunction f = [&](std::span<const double> th) { return eval(s.build_circuit(th)); };
  for (auto method : {OptimizerMethod::NelderMead, OptimizerMethod::ParamShiftAdam}) {
    VqeOptimizerConfig cfg;
    cfg.method = method;
    cfg.adam_lr = 0.1;
    // theta = 0 is a stationary point, so the gradient method starts just off it.
    const double start = method == OptimizerMethod::NelderMead ? 0.0 : 0.1;
    const auto r = minimize(f, {start}, cfg);
    EXPECT_NEAR(r.cost, -1.0, 1e-4);
    EXPECT_NEAR(std::abs(std::remainder(r.thetas[0], 2 * std::numbers::pi)), std::numbers::pi, 2e-2);
  }
}

TEST(Optimizer, EmptyCircuitCostsOneCall) {
  const auto h = rf::qcore::heisenberg_hamiltonian(2);
  CostEvaluator eval(h, std::nullopt, 1, 0);
  const CostFunction f = [&](std::span<const double>) { return eval({}); };
  const auto r = minimize(f, {}, VqeOptimizerConfig{});
  EXPECT_EQ(r.cost_calls, 1u);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_DOUBLE_EQ(r.cost, 1.0 + 2.0);  // ZZ + Z0 + Z1 on |00>
}

TEST(Optimizer, TwoQubitHeisenbergMatchesGridSearch) {
  const auto h = rf::qcore::heisenberg_hamiltonian(2);
  CostEvaluator eval(h, std::nullopt, 1, 0);
  auto circuit = [](double a, double b) {
    return rf::qcore::Circuit{GateSpec::one(GateKind::RY, 0, a), GateSpec::two(GateKind::CNOT, 0, 1),
                              GateSpec::one(GateKind::RY, 1, b)};
  };
  double grid = 1e9;
  const int steps = 360;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j)
      grid = std::min(grid, eval(circuit(2 * std::numbers::pi * i / steps, 2 * std::numbers::pi * j / steps)));
  const CostFunction f = [&](std::span<const double> th) { return eval(circuit(th[0], th[1])); };
  for (auto method : {OptimizerMethod::NelderMead, OptimizerMethod::ParamShiftAdam}) {
    VqeOptimizerConfig cfg;
    cfg.method = method;
    cfg.adam_lr = 0.1;
    const auto r = minimize(f, {0.3, 0.3}, cfg);
    EXPECT_LE(r.cost, -3.0 + 0.2);
    EXPECT_LE(r.cost, grid + 1e-6);
    EXPECT_GE(r.cost, -3.0 - 1e-9);
  }
}

TEST(Optimizer, ParameterShiftMatchesFiniteDifference) {
  const auto h = rf::qcore::heisenberg_hamiltonian(3);
  CostEvaluator eval(h, std::nullopt, 1, 0);
  CircuitTensorState s(3, 6, Encoding::II);
  s.place(GateKind::RY, 0);
  s.place(GateKind::RXX, 0, 1);
  s.place(GateKind::RZZ, 1, 2);
  s.place(GateKind::RX, 2);
  const CostFunction f = [&](std::span<const double> th) { return eval(s.build_circuit(th)); };
  const std::vector<double> th{0.3, -0.7, 1.1, 0.4};
  const auto g = parameter_shift_gradient(f, th);
  for (std::size_t j = 0; j < th.size(); ++j) {
    auto p = th, m = th;
    p[j] += 1e-6;
    m[j] -= 1e-6;
    EXPECT_NEAR(g[j], (f(p) - f(m)) / 2e-6, 1e-6);
  }
}

TEST(QasReward, Examples) {
  EXPECT_DOUBLE_EQ(qas_reward(2.0, 1.0, 0.0, -10.0, false), 0.5);
  EXPECT_DOUBLE_EQ(qas_reward(2.0, 1.0, 0.0, 1.5, false), 5.0);
  EXPECT_DOUBLE_EQ(qas_reward(2.0, 1.0, 0.0, -10.0, true), -5.0);
  EXPECT_DOUBLE_EQ(qas_reward(1.0, 100.0, 0.0, -10.0, false), -1.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double r = qas_reward(u(rng), u(rng), -6.0, -10.0, false);
    EXPECT_GE(r, -1.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(Amortization, EvaluationCountLaw) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> len(1, 500);
  const int ms[] = {1, 3, 5, 7, 10, 15};
  std::uniform_int_distribution<int> mi(0, 5);
  for (int trial = 0; trial < 10000; ++trial) {
    const int T = len(rng);
    const int m = ms[mi(rng)];
    int evals = 0;
    for (int t = 1; t <= T; ++t) evals += evaluation_due(t, m, t == T) ? 1 : 0;
    EXPECT_EQ(evals, (T + m - 1) / m);
  }
}

TEST(QasEnv, EvaluatesAtTenTwentyTwentyFive) {
  QasEnv env(heis_config(2, 10, 25));
  rf::Rng rng(1);
  env.reset(rng);
  std::vector<int> evaluated;
  const auto mask_action = [&]() {
    const auto mask = env.legal_mask();
    for (std::size_t a = 0; a < mask.size(); ++a)
      if (mask[a]) return a;
    return std::size_t{0};
  };
  while (!env.done()) {
    const auto r = env.step_amortized(mask_action());
    if (r.evaluated) evaluated.push_back(env.t());
    else EXPECT_EQ(r.reward, 0.0);
  }
  EXPECT_EQ(evaluated, (std::vector<int>{10, 20, 25}));
  EXPECT_EQ(env.episode_stats().evaluations, 3);
}

TEST(QasEnv, MOneEvaluatesEveryStep) {
  QasEnv env(heis_config(2, 1, 6));
  rf::Rng rng(2);
  env.reset(rng);
  int evals = 0;
  std::uniform_int_distribution<std::size_t> pick(0, env.action_count() - 1);
  while (!env.done()) evals += env.step_amortized(pick(rng)).evaluated ? 1 : 0;
  EXPECT_EQ(evals, env.t());
}

TEST(QasEnv, RandomEpisodesObeyCountLawAndGateIdentity) {
  rf::Rng rng(4);
  for (int m : {1, 3, 5}) {
    QasEnv env(heis_config(3, m, 12));
    for (int ep = 0; ep < 10; ++ep) {
      env.reset(rng);
      while (!env.done()) {
        const auto mask = env.legal_mask();
        std::vector<std::size_t> legal;
        for (std::size_t a = 0; a < mask.size(); ++a)
          if (mask[a]) legal.push_back(a);
        std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
        const auto r = env.step_amortized(legal[pick(rng)]);
        if (r.evaluated && !r.done) {
          EXPECT_GE(r.reward, -1.0);
          EXPECT_LE(r.reward, 1.0);
        }
        if (r.done) EXPECT_TRUE(r.reward == 5.0 || r.reward == -5.0);
      }
      const auto st = env.episode_stats();
      EXPECT_EQ(st.evaluations, (st.steps + m - 1) / m);
      EXPECT_EQ(st.total_gates, st.cnot_count + st.rot_count);
      EXPECT_EQ(st.total_gates, st.steps);
    }
  }
}

TEST(QasEnv, ResetObservationAndEmptyStats) {
  QasEnv env(heis_config(3, 5, 10));
  rf::Rng rng(6);
  const auto obs = env.reset(rng);
  EXPECT_EQ(obs.size(), 10u * 6 * 3 + 1);
  EXPECT_EQ(env.observation_size(), obs.size());
  EXPECT_DOUBLE_EQ(obs.back(), 2.0 + 3.0);  // <000|H|000>
  const auto st = env.episode_stats();
  EXPECT_EQ(st.total_gates, 0);
  EXPECT_EQ(st.cnot_count, 0);
  EXPECT_EQ(st.rot_count, 0);
  EXPECT_NEAR(st.min_error, 5.0 - rf::qcore::exact_ground_energy(env.config().hamiltonian), 1e-12);
  EXPECT_DOUBLE_EQ(env.c_min(), -static_cast<double>(env.config().hamiltonian.terms().size()));
}

TEST(QasEnv, GateCounts) {
  CircuitTensorState s(3, 5, Encoding::I);
  s.encode_action_I({0, 1, 2, 3});
  s.encode_action_I({3, 0, 1, 1});
  const auto st = count_gates(s);
  EXPECT_EQ(st.total_gates, 3);
  EXPECT_EQ(st.cnot_count, 1);
  EXPECT_EQ(st.rot_count, 2);
}

TEST(QasEnv, MaskAndIllegalActions) {
  QasConfig c = heis_config(2, 1, 50);
  c.max_layers = 2;
  QasEnv env(std::move(c));
  rf::Rng rng(8);
  env.reset(rng);
  // CNOT(0->1) twice fills both layers on both qubits.
  env.step_amortized(0);
  if (!env.done()) env.step_amortized(0);
  ASSERT_TRUE(env.done());
  EXPECT_THROW(env.step_amortized(0), std::logic_error);
  for (auto v : env.legal_mask()) EXPECT_EQ(v, 0);
}

TEST(QasEnv, WarmStartNeverWorsens) {
  QasConfig c = heis_config(3, 1, 30);
  QasEnv env(std::move(c));
  rf::Rng rng(10);
  env.reset(rng);
  std::uniform_int_distribution<std::size_t> pick(0, env.action_count() - 1);
  CostEvaluator eval(env.config().hamiltonian, std::nullopt, 1, 0);
  for (int i = 0; i < 8 && !env.done(); ++i) {
    env.step_amortized(pick(rng));
    if (env.done()) break;
    const double warm = eval(env.state().build_circuit(env.thetas()));
    const auto r = env.optimize_current();
    EXPECT_LE(r.cost, warm + 1e-12);
  }
}

TEST(Noise, ZeroDepolarizingMatchesNoiseless) {
  const auto h = rf::qcore::heisenberg_hamiltonian(2);
  const rf::qcore::Circuit c{GateSpec::one(GateKind::RY, 0, 0.7), GateSpec::two(GateKind::CNOT, 0, 1),
                             GateSpec::one(GateKind::RX, 1, -1.2)};
  const double pure = rf::qcore::expectation(h, rf::qcore::simulate(c, 2));
  const double mixed = rf::qcore::expectation(h, rf::qcore::simulate_noisy(c, 2, {0.0, 0.0}));
  EXPECT_NEAR(pure, mixed, 1e-9);
  CostEvaluator noisy(h, rf::qcore::NoiseModel{0.01, 0.05}, 1, 0);
  EXPECT_GT(noisy(c), pure - 1e-9 - 10.0);
  EXPECT_NE(noisy(c), pure);
}

TEST(Curriculum, TimeBasedTightening) {
  CurriculumConfig cfg;
  cfg.xi0 = 5.0;
  Curriculum c(cfg);
  EXPECT_EQ(c.xi(), 5.0);
  for (int i = 0; i < 1999; ++i) c.on_episode_end(false, 1.0);
  EXPECT_EQ(c.xi(), 5.0);
  c.on_episode_end(false, 1.0);
  EXPECT_DOUBLE_EQ(c.xi(), 5.0 - 0.001);
}

TEST(Curriculum, NonIncreasingAndSuccessSnap) {
  CurriculumConfig cfg;
  cfg.xi0 = 0.5;
  cfg.success_threshold = 5;
  cfg.shift_time = 100;
  Curriculum c(cfg);
  std::mt19937_64 rng(12);
  std::bernoulli_distribution win(0.3);
  std::uniform_real_distribution<double> err(0.0, 0.6);
  double prev = c.xi();
  for (int i = 0; i < 10000; ++i) {
    c.on_episode_end(win(rng), err(rng));
    EXPECT_LE(c.xi(), prev);
    EXPECT_GE(c.xi(), 0.0);
    prev = c.xi();
  }
  Curriculum d(cfg);
  for (int i = 0; i < 5; ++i) d.on_episode_end(true, 0.01);
  EXPECT_DOUBLE_EQ(d.xi(), 0.01 + kChemicalAccuracy);
}

TEST(QasCsv, Header) {
  std::ostringstream os;
  write_qas_header(os);
  write_qas_row(os, QasEpisodeRow{3, 10, 2, -1.5, 0.25, 10, 4, 6, 0.5, 0.9, 12.5});
  EXPECT_EQ(os.str(),
            "episode,steps,evals,best_cost,error_vs_exact,total_gates,cnot,rot,xi,epsilon,wall_ms\n"
            "3,10,2,-1.5,0.25,10,4,6,0.5,0.9,12.5\n");
}
