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

#include "replayforge/replay/buffer.hpp"
#include "replayforge/replay/priority.hpp"
#include "replayforge/replay/sum_tree.hpp"

namespace {

using namespace rf;

void BM_SumTreeSet(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  replay::SumTree tree(n);
  Rng rng(1);
  std::uniform_int_distribution<std::size_t> leaf(0, n - 1);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (auto _ : state) tree.set(leaf(rng), p(rng));
  benchmark::DoNotOptimize(tree.total());
}
BENCHMARK(BM_SumTreeSet)->Range(1 << 10, 1 << 20);

void BM_SumTreeFind(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  replay::SumTree tree(n);
  Rng rng(2);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) tree.set(i, p(rng));
  for (auto _ : state) benchmark::DoNotOptimize(tree.find(p(rng) * tree.total()));
}
BENCHMARK(BM_SumTreeFind)->Range(1 << 10, 1 << 20);

void BM_Reliability(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::uniform_real_distribution<double> p(0.0, 2.0);
  std::vector<double> td(n);
  for (auto& x : td) x = p(rng);
  for (auto _ : state) benchmark::DoNotOptimize(replay::reliability_scores(td));
}
BENCHMARK(BM_Reliability)->Range(16, 1024);

replay::Transition make_transition(Rng& rng, std::uint32_t dim, std::uint32_t episode, std::uint32_t step) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  replay::Transition t;
  t.state.resize(dim);
  t.next_state.resize(dim);
  for (auto& x : t.state) x = u(rng);
  for (auto& x : t.next_state) x = u(rng);
  t.action = step % 4;
  t.reward = u(rng);
  t.episode_id = episode;
  t.step = step;
  return t;
}

replay::ReplayBuffer filled_buffer(replay::Strategy s, std::size_t n) {
  replay::BufferConfig cfg;
  cfg.strategy = s;
  cfg.capacity = n;
  cfg.state_dim = 16;
  cfg.action_count = 4;
  replay::ReplayBuffer buf(cfg);
  Rng rng(4);
  std::uniform_real_distribution<double> td(0.0, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ep = static_cast<std::uint32_t>(i / 20);
    const auto step = static_cast<std::uint32_t>(i % 20 + 1);
    auto t = make_transition(rng, 16, ep, step);
    t.done = step == 20;
    const std::size_t slot = buf.add(std::move(t));
    const double d = td(rng);
    buf.update_td(std::span<const std::size_t>(&slot, 1), std::span<const double>(&d, 1));
    if (step == 20) buf.on_episode_end(ep);
  }
  return buf;
}

void BM_BufferSample(benchmark::State& state) {
  const auto s = static_cast<replay::Strategy>(state.range(0));
  auto buf = filled_buffer(s, 100000);
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(buf.sample(64, rng));
  state.SetLabel(std::string(replay::strategy_name(s)));
}
BENCHMARK(BM_BufferSample)->DenseRange(0, 4);

void BM_BufferUpdateTd(benchmark::State& state) {
  const auto s = static_cast<replay::Strategy>(state.range(0));
  auto buf = filled_buffer(s, 100000);
  Rng rng(6);
  std::uniform_real_distribution<double> td(0.0, 2.0);
  std::vector<double> vals(64);
  for (auto _ : state) {
    auto batch = buf.sample(64, rng);
    for (auto& v : vals) v = td(rng);
    buf.update_td(batch.indices, vals);
  }
  state.SetLabel(std::string(replay::strategy_name(s)));
}
BENCHMARK(BM_BufferUpdateTd)->DenseRange(0, 4);

}  // namespace

BENCHMARK_MAIN();
