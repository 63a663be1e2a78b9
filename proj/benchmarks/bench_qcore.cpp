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

#include <benchmark/benchmark.h>

#include <random>

#include "replayforge/qcore/gates.hpp"
#include "replayforge/qcore/hamiltonian.hpp"
#include "replayforge/qcore/sampling.hpp"
#include "replayforge/qcore/state.hpp"

namespace {

using namespace rf;
using qcore::GateKind;
using qcore::GateSpec;

qcore::Circuit layered_circuit(int n, int layers) {
  qcore::Circuit c;
  Rng rng(9);
  std::uniform_real_distribution<double> a(-3.0, 3.0);
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) c.push_back(GateSpec::one(GateKind::RY, q, a(rng)));
    for (int q = 0; q + 1 < n; ++q) c.push_back(GateSpec::two(GateKind::CNOT, q, q + 1));
  }
  return c;
}

void BM_Statevector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto c = layered_circuit(n, 10);
  for (auto _ : state) benchmark::DoNotOptimize(qcore::simulate(c, n));
  state.counters["gates"] = static_cast<double>(c.size());
}
BENCHMARK(BM_Statevector)->DenseRange(2, 10, 2);

void BM_DensityNoisy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto c = layered_circuit(n, 10);
  const qcore::NoiseModel noise{0.001, 0.005};
  for (auto _ : state) benchmark::DoNotOptimize(qcore::simulate_noisy(c, n, noise));
  state.counters["gates"] = static_cast<double>(c.size());
}
BENCHMARK(BM_DensityNoisy)->DenseRange(2, 6);

void BM_HeisenbergEnergy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto h = qcore::heisenberg_hamiltonian(n);
  const auto psi = qcore::simulate(layered_circuit(n, 5), n);
  for (auto _ : state) benchmark::DoNotOptimize(qcore::expectation(h, psi));
}
BENCHMARK(BM_HeisenbergEnergy)->DenseRange(2, 8, 2);

void BM_HaarRandom(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(10);
  for (auto _ : state) benchmark::DoNotOptimize(qcore::haar_random(n, rng));
}
BENCHMARK(BM_HaarRandom)->DenseRange(1, 3);

}  // namespace

BENCHMARK_MAIN();
