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
#include <sstream>

#include <gtest/gtest.h>

#include "replayforge/agent/dqn.hpp"
#include "replayforge/agent/network.hpp"

using namespace rf::agent;
using rf::replay::Transition;

namespace {

// Reimplementation oracle: explicit loops, no Eigen products.
std::vector<double> naive_forward(const QNetwork& net, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto w = net.weight(l);
    const auto b = net.bias(l);
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double s = b(r);
      for (Eigen::Index c = 0; c < w.cols(); ++c) s += w(r, c) * a[static_cast<std::size_t>(c)];
      if (l + 1 < net.layer_count()) {
        s = net.activation() == Activation::ReLU
                ? std::max(s, 0.0)
                : (s > 0 ? 1.0507009873554805 * s : 1.0507009873554805 * 1.6732632423543772 * (std::exp(s) - 1.0));
      }
      z[static_cast<std::size_t>(r)] = s;
    }
    a = std::move(z);
  }
  return a;
}

struct Problem {
  Eigen::MatrixXd states;
  std::vector<int> actions;
  std::vector<double> targets;
  std::vector<double> weights;
};

Problem random_problem(int in, int out, int batch, rf::Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> a(0, out - 1);
  std::uniform_real_distribution<double> w(0.2, 1.0);
  Problem p;
  p.states = Eigen::MatrixXd(in, batch);
  for (Eigen::Index i = 0; i < p.states.size(); ++i) p.states.data()[i] = g(rng);
  for (int i = 0; i < batch; ++i) {
    p.actions.push_back(a(rng));
    p.targets.push_back(3.0 * g(rng));
    p.weights.push_back(w(rng));
  }
  return p;
}

double relative_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8}); }

Transition tr(std::vector<float> s, int a, float r, std::vector<float> s2, bool done, std::uint32_t ep = 0) {
  Transition t;
  t.state = std::move(s);
  t.action = static_cast<std::uint32_t>(a);
  t.reward = r;
  t.next_state = std::move(s2);
  t.done = done;
  t.episode_id = ep;
  return t;
}

}  // namespace

TEST(Network, ZeroParametersGiveZeroOutput) {
  QNetwork net({4, 8, 3}, Activation::ReLU);
  const std::vector<double> x{1, 2, 3, 4};
  EXPECT_EQ(net.forward(x), Eigen::VectorXd::Zero(3));
}

TEST(Network, IdentityLinearLayer) {
  QNetwork net({3, 3}, Activation::ReLU);
  net.weight(0) = Eigen::MatrixXd::Identity(3, 3);
  const std::vector<double> x{-1.5, 0.25, 7};
  const Eigen::VectorXd q = net.forward(x);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(q(i), x[static_cast<std::size_t>(i)]);
}

TEST(Network, ForwardMatchesNaiveOracle) {
  rf::Rng rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto act : {Activation::ReLU, Activation::SELU}) {
    for (int trial = 0; trial < 20; ++trial) {
      QNetwork net({6, 17, 9, 4}, act, rng);
      std::vector<double> x(6);
      for (auto& v : x) v = g(rng);
      const auto q = net.forward(x);
      const auto o = naive_forward(net, x);
      for (int i = 0; i < 4; ++i) EXPECT_NEAR(q(i), o[static_cast<std::size_t>(i)], 1e-10);
    }
  }
  QNetwork net({6, 4}, Activation::ReLU);
  EXPECT_THROW(net.forward(std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST(Network, GradientMatchesFiniteDifferences) {
  rf::Rng rng(11);
  for (auto sizes : {std::vector<int>{5, 7, 3}, std::vector<int>{5, 9, 6, 3}}) {
    for (auto act : {Activation::ReLU, Activation::SELU}) {
      for (auto kind : {LossKind::Huber, LossKind::Squared}) {
        QNetwork net(sizes, act, rng);
        const Problem p = random_problem(5, 3, 6, rng);
        Eigen::VectorXd grad;
        net.loss_and_gradient(p.states, p.actions, p.targets, p.weights, kind, grad);
        std::uniform_int_distribution<std::size_t> pick(0, net.parameter_count() - 1);
        const double h = 1e-5;
        // 50 random coordinates
        for (int k = 0; k < 50; ++k) {
          const std::size_t i = pick(rng);
          QNetwork plus = net, minus = net;
          plus.parameters()(static_cast<Eigen::Index>(i)) += h;
          minus.parameters()(static_cast<Eigen::Index>(i)) -= h;
          const double fd = (plus.loss(p.states, p.actions, p.targets, p.weights, kind) -
                             minus.loss(p.states, p.actions, p.targets, p.weights, kind)) /
                            (2 * h);
          const double an = grad(static_cast<Eigen::Index>(i));
          if (std::abs(fd) < 1e-9 && std::abs(an) < 1e-9) continue;
          EXPECT_LT(relative_error(an, fd), 1e-4) << "param " << i;
        }
      }
    }
  }
}

TEST(Network, DirectionalGradientOnDeskNetwork) {
  rf::Rng rng(5);
  QNetwork net({8, 128, 128, 6}, Activation::ReLU, rng);
  const Problem p = random_problem(8, 6, 16, rng);
  Eigen::VectorXd grad;
  net.loss_and_gradient(p.states, p.actions, p.targets, p.weights, LossKind::Huber, grad);
  std::normal_distribution<double> g(0.0, 1.0);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(net.parameter_count()));
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = g(rng);
    d.normalize();
    QNetwork plus = net, minus = net;
    plus.parameters() += h * d;
    minus.parameters() -= h * d;
    const double fd = (plus.loss(p.states, p.actions, p.targets, p.weights, LossKind::Huber) -
                       minus.loss(p.states, p.actions, p.targets, p.weights, LossKind::Huber)) /
                      (2 * h);
    EXPECT_LT(relative_error(grad.dot(d), fd), 1e-4);
  }
}

TEST(Network, UnitWeightsEqualUnweightedLoss) {
  rf::Rng rng(2);
  QNetwork net({4, 8, 3}, Activation::ReLU, rng);
  const Problem p = random_problem(4, 3, 10, rng);
  const std::vector<double> ones(10, 1.0);
  EXPECT_EQ(net.loss(p.states, p.actions, p.targets, ones, LossKind::Huber),
            net.loss(p.states, p.actions, p.targets, {}, LossKind::Huber));
}

TEST(Network, MatchingTargetsLeaveParametersUnchanged) {
  rf::Rng rng(8);
  QNetwork net({4, 8, 3}, Activation::ReLU, rng);
  Problem p = random_problem(4, 3, 10, rng);
  const Eigen::MatrixXd q = net.forward_batch(p.states);
  for (int i = 0; i < 10; ++i) p.targets[static_cast<std::size_t>(i)] = q(p.actions[static_cast<std::size_t>(i)], i);
  const Eigen::VectorXd before = net.parameters();
  Adam adam(net.parameter_count(), {});
  const double l = backward_and_step(net, p.states, p.actions, p.targets, p.weights, LossKind::Huber, 1.0, adam);
  EXPECT_EQ(l, 0.0);
  EXPECT_EQ(net.parameters(), before);
}

TEST(Network, ClipAndAdamBasics) {
  Eigen::VectorXd g(2);
  g << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(clip_global_norm(g, 1.0), 5.0);
  EXPECT_NEAR(g.norm(), 1.0, 1e-15);
  Eigen::VectorXd p = Eigen::VectorXd::Ones(2);
  Adam adam(2, {0.1});
  adam.step(p, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(p, Eigen::VectorXd::Ones(2));
  // first Adam step moves each coordinate by lr * sign(g) (up to eps)
  Eigen::VectorXd gr(2);
  gr << 2.0, -0.5;
  Adam fresh(2, {0.1});
  Eigen::VectorXd q = Eigen::VectorXd::Zero(2);
  fresh.step(q, gr);
  EXPECT_NEAR(q(0), -0.1, 1e-8);
  EXPECT_NEAR(q(1), 0.1, 1e-8);
}

TEST(Network, LearnsSimpleRegression) {
  rf::Rng rng(4);
  QNetwork net({2, 16, 2}, Activation::ReLU, rng);
  Adam adam(net.parameter_count(), {1e-2});
  Problem p = random_problem(2, 2, 32, rng);
  for (int i = 0; i < 32; ++i) p.targets[static_cast<std::size_t>(i)] = p.states(0, i) - 0.5 * p.states(1, i);
  const double first = net.loss(p.states, p.actions, p.targets, {}, LossKind::Squared);
  for (int it = 0; it < 2000; ++it) backward_and_step(net, p.states, p.actions, p.targets, {}, LossKind::Squared, 10.0, adam);
  EXPECT_LT(net.loss(p.states, p.actions, p.targets, {}, LossKind::Squared), 0.05 * first);
}

TEST(Network, CheckpointRoundTrip) {
  rf::Rng rng(6);
  QNetwork net({5, 11, 4}, Activation::SELU, rng);
  std::stringstream s;
  net.save(s);
  const QNetwork back = QNetwork::load(s);
  EXPECT_EQ(back.layer_sizes(), net.layer_sizes());
  EXPECT_EQ(back.activation(), Activation::SELU);
  EXPECT_EQ(back.parameters(), net.parameters());
  std::istringstream bad("XXXX");
  EXPECT_THROW(QNetwork::load(bad), rf::IoError);
  std::string bytes = s.str();
  std::istringstream trunc(bytes.substr(0, bytes.size() - 4));
  EXPECT_THROW(QNetwork::load(trunc), rf::IoError);
}

TEST(SelectAction, GreedyAndMasked) {
  QNetwork net({1, 3}, Activation::ReLU);
  net.bias(0) << 1, 5, 3;
  rf::Rng rng(1);
  const std::vector<double> s{0.0};
  EXPECT_EQ(select_action(net, s, 0.0, {}, rng), 1);
  net.bias(0) << 9, 5, 3;
  const std::vector<std::uint8_t> mask{0, 1, 1};
  EXPECT_EQ(select_action(net, s, 0.0, mask, rng), 1);
  net.bias(0) << 2, 2, 2;
  EXPECT_EQ(select_action(net, s, 0.0, {}, rng), 0);
  const std::vector<std::uint8_t> none{0, 0, 0};
  EXPECT_THROW(select_action(net, s, 0.5, none, rng), std::invalid_argument);
}

TEST(SelectAction, ExplorationUniformOverLegal) {
  QNetwork net({1, 4}, Activation::ReLU);
  rf::Rng rng(12);
  const std::vector<double> s{0.0};
  const std::vector<std::uint8_t> mask{1, 0, 1, 1};
  std::array<int, 4> counts{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(select_action(net, s, 1.0, mask, rng))];
  EXPECT_EQ(counts[1], 0);
  for (std::size_t a : {0u, 2u, 3u}) EXPECT_NEAR(counts[a] / static_cast<double>(draws), 1.0 / 3.0, 0.01);
}

TEST(ComputeTarget, TerminalAndDoubleQ) {
  QNetwork online({1, 2}, Activation::ReLU), target({1, 2}, Activation::ReLU);
  target.bias(0) << 10, 0;
  online.bias(0) << 0, 10;
  const Transition live = tr({0.f}, 0, 1.0f, {0.f}, false);
  const Transition term = tr({0.f}, 0, 1.0f, {0.f}, true);
  const Transition* batch[] = {&live, &term};
  const auto dqn = compute_target(batch, online, target, 1.0, false);
  const auto ddqn = compute_target(batch, online, target, 1.0, true);
  EXPECT_EQ(dqn[0], 11.0);
  EXPECT_EQ(ddqn[0], 1.0);
  EXPECT_EQ(dqn[1], 1.0);
  EXPECT_EQ(ddqn[1], 1.0);
  const auto same_a = compute_target(batch, target, target, 0.9, false);
  const auto same_b = compute_target(batch, target, target, 0.9, true);
  EXPECT_EQ(same_a, same_b);
}

TEST(NStep, PassthroughAndCollapse) {
  NStepAccumulator one(1, 0.9);
  auto out = one.push(tr({0.f}, 1, 2.0f, {1.f}, false));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].reward, 2.0f);
  EXPECT_EQ(out[0].next_state, std::vector<float>{1.f});

  NStepAccumulator three(3, 0.5);
  EXPECT_TRUE(three.push(tr({0.f}, 0, 1.0f, {1.f}, false)).empty());
  EXPECT_TRUE(three.push(tr({1.f}, 0, 1.0f, {2.f}, false)).empty());
  out = three.push(tr({2.f}, 0, 1.0f, {3.f}, false));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].reward, 1.75f);
  EXPECT_EQ(out[0].state, std::vector<float>{0.f});
  EXPECT_EQ(out[0].next_state, std::vector<float>{3.f});
  EXPECT_FALSE(out[0].done);
}

TEST(NStep, EpisodeEndFlushesShortHorizons) {
  NStepAccumulator acc(3, 0.5);
  EXPECT_TRUE(acc.push(tr({0.f}, 0, 1.0f, {1.f}, false)).empty());
  auto out = acc.push(tr({1.f}, 0, 2.0f, {2.f}, true));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].reward, 2.0f);  // 1 + 0.5 * 2
  EXPECT_TRUE(out[0].done);
  EXPECT_EQ(out[0].next_state, std::vector<float>{2.f});
  EXPECT_EQ(out[1].reward, 2.0f);
  EXPECT_TRUE(out[1].done);
  EXPECT_EQ(acc.pending(), 0u);
  acc.push(tr({0.f}, 0, 1.0f, {1.f}, false, 4));
  EXPECT_THROW(acc.push(tr({0.f}, 0, 1.0f, {1.f}, false, 5)), std::logic_error);
}

TEST(NStep, MatchesBruteForceReturns) {
  rf::Rng rng(21);
  std::uniform_real_distribution<float> r(-1.0f, 1.0f);
  std::uniform_int_distribution<int> len(1, 20);
  for (int n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const double gamma = 0.9;
      const int T = len(rng);
      std::vector<float> rewards(static_cast<std::size_t>(T));
      for (auto& x : rewards) x = r(rng);
      NStepAccumulator acc(n, gamma);
      std::vector<Transition> got;
      for (int t = 0; t < T; ++t) {
        auto e = acc.push(tr({static_cast<float>(t)}, 0, rewards[static_cast<std::size_t>(t)],
                             {static_cast<float>(t + 1)}, t == T - 1));
        got.insert(got.end(), e.begin(), e.end());
      }
      ASSERT_EQ(got.size(), static_cast<std::size_t>(T));
      for (int t = 0; t < T; ++t) {
        double ret = 0.0;
        const int end = std::min(T, t + n);
        for (int k = t; k < end; ++k) ret += std::pow(gamma, k - t) * rewards[static_cast<std::size_t>(k)];
        const auto& e = got[static_cast<std::size_t>(t)];
        EXPECT_NEAR(e.reward, ret, 1e-5);
        EXPECT_EQ(e.state[0], static_cast<float>(t));
        EXPECT_EQ(e.next_state[0], static_cast<float>(end));
        EXPECT_EQ(e.done, end == T);
      }
    }
  }
}

TEST(Epsilon, DecaysToFloor) {
  EpsilonSchedule eps(1.0, 0.05, 0.99931);
  double prev = eps.value();
  for (int i = 0; i < 10000; ++i) {
    const double v = eps.advance();
    EXPECT_LE(v, prev);
    EXPECT_GE(v, 0.05);
    prev = v;
  }
  EXPECT_EQ(prev, 0.05);
}

TEST(TargetSync, CountsAndCopies) {
  TargetSync s(SyncMode::Episodes, 100);
  for (int e = 0; e < 1234; ++e) {
    s.on_episode();
    s.on_step();
  }
  EXPECT_EQ(s.syncs(), 12);

  rf::Rng rng(9);
  AgentConfig cfg;
  cfg.hidden = {8};
  cfg.sync_mode = SyncMode::Steps;
  cfg.sync_period = 3;
  cfg.batch_size = 4;
  DqnAgent agent(2, 3, cfg, rng);
  rf::replay::BufferConfig bc;
  bc.capacity = 32;
  bc.state_dim = 2;
  bc.action_count = 3;
  rf::replay::ReplayBuffer buf(bc);
  for (int i = 0; i < 16; ++i) buf.add(tr({0.1f * i, 1.f}, i % 3, 1.0f, {0.1f * (i + 1), 1.f}, false));
  const Eigen::VectorXd target_before = agent.target().parameters();
  agent.learn(buf, rng);
  agent.on_step();
  agent.learn(buf, rng);
  agent.on_step();
  EXPECT_EQ(agent.target().parameters(), target_before);
  EXPECT_NE(agent.online().parameters(), target_before);
  agent.on_step();
  EXPECT_EQ(agent.target().parameters(), agent.online().parameters());
  const std::vector<double> x{0.3, -0.2};
  EXPECT_EQ(agent.target().forward(x), agent.online().forward(x));
}

TEST(Agent, DeterministicUnderFixedSeed) {
  auto run = [] {
    rf::Rng rng(42);
    AgentConfig cfg;
    cfg.hidden = {16};
    cfg.batch_size = 8;
    DqnAgent agent(2, 3, cfg, rng);
    rf::replay::BufferConfig bc;
    bc.strategy = rf::replay::Strategy::PER;
    bc.capacity = 64;
    bc.state_dim = 2;
    bc.action_count = 3;
    rf::replay::ReplayBuffer buf(bc);
    for (int i = 0; i < 40; ++i) buf.add(tr({0.1f * i, 1.f}, i % 3, 0.5f, {0.1f * (i + 1), 1.f}, i % 10 == 9));
    for (int i = 0; i < 50; ++i) agent.learn(buf, rng);
    return agent.online().parameters();
  };
  EXPECT_EQ(run(), run());
}
