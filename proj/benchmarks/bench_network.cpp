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
#include <vector>

#include "replayforge/agent/network.hpp"

namespace {

using namespace rf;

agent::QNetwork make_net(int in, int hidden, int out) {
  Rng rng(7);
  return agent::QNetwork({in, hidden, hidden, out}, agent::Activation::ReLU, rng);
}

Eigen::MatrixXd random_batch(int rows, int cols) {
  Rng rng(8);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

void BM_Forward(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  const int batch = static_cast<int>(state.range(1));
  auto net = make_net(64, hidden, 16);
  const Eigen::MatrixXd x = random_batch(64, batch);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward_batch(x));
}
BENCHMARK(BM_Forward)->ArgsProduct({{128, 1000}, {1, 64, 200}});

void BM_TrainStep(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  const int batch = static_cast<int>(state.range(1));
  auto net = make_net(64, hidden, 16);
  agent::Adam adam(net.parameter_count(), agent::AdamConfig{1e-4});
  const Eigen::MatrixXd x = random_batch(64, batch);
  std::vector<int> actions(static_cast<std::size_t>(batch));
  std::vector<double> targets(actions.size(), 0.5);
  std::vector<double> weights(actions.size(), 1.0);
  for (std::size_t i = 0; i < actions.size(); ++i) actions[i] = static_cast<int>(i % 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        agent::backward_and_step(net, x, actions, targets, weights, agent::LossKind::Huber, 1.0, adam));
  }
}
BENCHMARK(BM_TrainStep)->ArgsProduct({{128, 1000}, {64, 200}});

}  // namespace

BENCHMARK_MAIN();
