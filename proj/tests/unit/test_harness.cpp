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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "replayforge/harness/chain_mdp.hpp"
#include "replayforge/harness/config.hpp"
#include "replayforge/harness/runner.hpp"
#include "replayforge/harness/trainer.hpp"

using namespace rf;
using namespace rf::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rf_harness_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Drops the trailing wall_ms column of every CSV line.
std::string without_wall_clock(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

ExperimentConfig tiny_diag(const fs::path& out) {
  ExperimentConfig c = preset("diag_chain", true);
  c.episodes = 40;
  c.seeds = {0, 1};
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST(ChainMdp, GreedyOptimalPolicyReachesGoalInLengthMinusOneSteps) {
  for (int length : {2, 3, 6, 11}) {
    ChainMdp env({length, 0.0, 0});
    Rng rng(1);
    env.reset(rng);
    int steps = 0;
    StepResult r;
    do {
      r = env.step(1, rng);
      ++steps;
    } while (!r.done);
    EXPECT_EQ(steps, length - 1);
    EXPECT_DOUBLE_EQ(env.task_metric(), 1.0);
    EXPECT_TRUE(r.success);
  }
}

TEST(ChainMdp, RejectsShortChains) {
  EXPECT_THROW(ChainMdp({1, 0.0, 0}), ConfigError);
  EXPECT_THROW(ChainMdp({4, 1.0, 0}), ConfigError);
}

TEST(ChainMdp, EpisodeTruncatesAtMaxSteps) {
  ChainMdp env({5, 0.0, 7});
  Rng rng(2);
  env.reset(rng);
  int steps = 0;
  StepResult r;
  do {
    r = env.step(0, rng);
    ++steps;
  } while (!r.done);
  EXPECT_EQ(steps, 7);
  EXPECT_FALSE(r.success);
  EXPECT_THROW(env.step(0, rng), std::logic_error);
}

TEST(ChainMdp, ValueIterationMatchesDiscountedDistance) {
  const int L = 6;
  const double g = 0.9;
  const auto q = chain_q_values({L, 0.0, 0}, g);
  for (int s = 0; s + 1 < L; ++s) {
    EXPECT_NEAR(q[s][1], std::pow(g, L - 2 - s), 1e-10) << s;
    EXPECT_NEAR(q[s][0], g * std::pow(g, L - 2 - std::max(s - 1, 0)), 1e-10) << s;
  }
  EXPECT_EQ(q[L - 1][0], 0.0);
  EXPECT_EQ(q[L - 1][1], 0.0);
}

TEST(ChainMdp, ValueIterationSatisfiesBellmanWithSlip) {
  const int L = 7;
  const double g = 0.95, p = 0.2;
  const auto q = chain_q_values({L, p, 0}, g);
  auto v = [&](int s) { return s == L - 1 ? 0.0 : std::max(q[s][0], q[s][1]); };
  auto outcome = [&](int s, int move) {
    const int s2 = std::clamp(s + move, 0, L - 1);
    return (s2 == L - 1 ? 1.0 : 0.0) + g * v(s2);
  };
  for (int s = 0; s + 1 < L; ++s) {
    EXPECT_NEAR(q[s][1], (1 - p) * outcome(s, 1) + p * outcome(s, -1), 1e-9);
    EXPECT_NEAR(q[s][0], (1 - p) * outcome(s, -1) + p * outcome(s, 1), 1e-9);
  }
}

TEST(Config, RoundTripIsIdentityForEveryPreset) {
  for (const auto& name : preset_names()) {
    for (bool desk : {false, true}) {
      const ExperimentConfig c = preset(name, desk);
      const std::string text = to_text(c);
      const ExperimentConfig back = parse_config_text(text);
      EXPECT_EQ(to_text(back), text) << name << " desk=" << desk;
      EXPECT_EQ(to_text(parse_config_text(to_text(back))), text);
    }
  }
}

TEST(Config, ShippedFilesMatchPresets) {
  const fs::path dir = fs::path(RF_SOURCE_DIR) / "configs";
  for (const auto& name : preset_names()) {
    for (bool desk : {false, true}) {
      const fs::path file = dir / (name + (desk ? ".desk.ini" : ".ini"));
      ASSERT_TRUE(fs::exists(file)) << file;
      EXPECT_EQ(to_text(load_config(file.string())), to_text(preset(name, desk))) << file;
    }
  }
}

TEST(Config, PresetValues) {
  const auto c = preset("compile_1q_smallrot", false);
  EXPECT_EQ(c.agent.gamma, 0.99);
  EXPECT_EQ(c.agent.lr, 3e-4);
  EXPECT_EQ(c.agent.batch_size, 200u);
  EXPECT_EQ(c.replay.capacity, 500000u);
  EXPECT_EQ(c.agent.eps_decay, 0.99931);
  EXPECT_EQ(c.replay.omega_min, 0.1);
  EXPECT_EQ(c.replay.omega_max, 0.7);
  EXPECT_EQ(c.replay.t_ann, 500000);
  EXPECT_EQ(c.agent.grad_clip, 1.0);

  ExperimentConfig per = c;
  per.replay.strategy = replay::Strategy::PER;
  EXPECT_EQ(per.replay.buffer_config().spec.alpha, 0.6);
  ExperimentConfig reaper = c;
  reaper.replay.strategy = replay::Strategy::ReaPER;
  EXPECT_EQ(reaper.replay.buffer_config().spec.alpha, 0.4);
  EXPECT_EQ(reaper.replay.buffer_config().spec.omega, 0.2);

  const auto q = preset("qas_heisenberg_3q", false);
  EXPECT_EQ(q.replay.capacity, 20000u);
  EXPECT_EQ(q.agent.batch_size, 1000u);
  EXPECT_EQ(q.agent.n_step, 5);
  EXPECT_EQ(q.agent.sync_period, 500);
  EXPECT_EQ(q.agent.sync_mode, agent::SyncMode::Steps);

  const auto t = preset("transfer_heisenberg_3q", true);
  EXPECT_EQ(t.transfer.weights, (std::array<double, 4>{0.4, 0.1, 0.2, 0.3}));
  EXPECT_EQ(t.transfer.eps_start, 0.55);
  EXPECT_EQ(t.transfer.noise_p1, 0.001);
  EXPECT_EQ(t.transfer.noise_p2, 0.005);

  const auto d = preset("compile_1q_smallrot", true);
  EXPECT_EQ(d.compile.tolerance, 0.9);
  EXPECT_EQ(d.compile.max_len, 130);
  EXPECT_EQ(d.episodes, 3000);
  EXPECT_EQ(d.seeds.size(), 3u);
  EXPECT_EQ(d.compile.target_max_len, 20);
  EXPECT_THROW(preset("nope", true), ConfigError);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const std::string base = to_text(preset("diag_chain", true));
  EXPECT_THROW(parse_config_text(base + "\n[agent2]\nfoo=1\n"), ConfigError);
  EXPECT_THROW(parse_config_text(apply_overrides(base, {{"agent__gamam", "0.9"}})), ConfigError);
  EXPECT_THROW(parse_config_text(apply_overrides(base, {{"agent__gamma", "zero"}})), ConfigError);
  EXPECT_THROW(parse_config_text(apply_overrides(base, {{"agent__gamma", "1.5"}})), ConfigError);
  EXPECT_THROW(parse_config_text(apply_overrides(base, {{"replay__strategy", "fifo"}})), ConfigError);
  EXPECT_THROW(parse_config_text(apply_overrides(base, {{"experiment__seeds", ""}})), ConfigError);
  EXPECT_THROW(parse_config_text("[agent\ngamma=1"), ConfigError);
  EXPECT_THROW(apply_overrides(base, {{"gamma", "0.5"}}), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/file.ini"), IoError);
}

TEST(Config, OverridesApply) {
  const std::string base = to_text(preset("diag_chain", true));
  const auto c = parse_config_text(apply_overrides(
      base, {{"agent__gamma", "0.5"}, {"experiment__seeds", "4,5,9"}, {"replay__alpha", "0.25"}}));
  EXPECT_EQ(c.agent.gamma, 0.5);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5, 9}));
  EXPECT_EQ(c.replay.buffer_config().spec.alpha, 0.25);

  ::setenv("RF_OVERRIDE_chain__length", "9", 1);
  const auto env = environment_overrides();
  ::unsetenv("RF_OVERRIDE_chain__length");
  ASSERT_EQ(env.count("chain__length"), 1u);
  EXPECT_EQ(parse_config_text(apply_overrides(base, env)).chain.length, 9);
}

TEST(Config, ResolveDistinguishesMissingFilesFromUnknownPresets) {
  EXPECT_THROW(resolve_config("no_such_preset", true), ConfigError);
  EXPECT_THROW(resolve_config("/tmp/definitely/missing.ini", true), IoError);
  EXPECT_EQ(resolve_config("diag_chain", true).preset, "diag_chain");
}

TEST(Metrics, CsvRoundTrip) {
  std::vector<EpisodeMetrics> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].run_id = "diag_chain/0";
    rows[i].episode = i;
    rows[i].step = 10 * (i + 1);
    rows[i].length = 10;
    rows[i].episode_return = 0.1 * i + 1.0 / 3.0;
    rows[i].loss = i == 0 ? std::nan("") : 0.01 / (i + 1);
    rows[i].epsilon = std::pow(0.99, i);
    rows[i].omega_now = 0.1 + 0.6 * i / 7.0;
    rows[i].success = i % 2 == 1;
    rows[i].task_metric = -1e-7 * i;
    rows[i].wall_ms = 1.25 * i;
  }
  std::stringstream s;
  write_metrics_header(s);
  for (const auto& r : rows) write_metrics_row(s, r);
  const auto back = read_metrics(s);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].run_id, rows[i].run_id);
    EXPECT_EQ(back[i].episode, rows[i].episode);
    EXPECT_EQ(back[i].step, rows[i].step);
    EXPECT_EQ(back[i].episode_return, rows[i].episode_return);
    if (i == 0) {
      EXPECT_TRUE(std::isnan(back[i].loss));
    } else {
      EXPECT_EQ(back[i].loss, rows[i].loss);
    }
    EXPECT_EQ(back[i].epsilon, rows[i].epsilon);
    EXPECT_EQ(back[i].omega_now, rows[i].omega_now);
    EXPECT_EQ(back[i].success, rows[i].success);
    EXPECT_EQ(back[i].task_metric, rows[i].task_metric);
  }
  std::istringstream bad("run_id,episode\n");
  EXPECT_THROW(read_metrics(bad), IoError);
}

TEST(Aggregate, SampleMeanAndStd) {
  const auto a = aggregate({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(a.mean, 2.5);
  EXPECT_NEAR(a.std, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(a.n, 4u);
  EXPECT_EQ(aggregate({7.0}).std, 0.0);
}

TEST(Runner, TrainWritesRunDirectoriesAndSameSeedReproducesCsv) {
  const fs::path a = scratch_dir("a"), b = scratch_dir("b");
  const ExperimentConfig ca = tiny_diag(a);
  ExperimentConfig cb = tiny_diag(b);
  for (auto s : ca.seeds) {
    const auto out = train_seed(ca, s);
    EXPECT_TRUE(fs::exists(out.paths.metrics));
    EXPECT_TRUE(fs::exists(out.paths.checkpoint));
    EXPECT_TRUE(fs::exists(out.paths.buffer));
    EXPECT_TRUE(fs::exists(out.paths.snapshot));
    EXPECT_EQ(out.episodes, 40);
    EXPECT_EQ(load_config(out.paths.snapshot).seeds, std::vector<std::uint64_t>{s});
    train_seed(cb, s);
  }
  const auto ma = slurp(a / "diag_chain" / "0" / "metrics.csv");
  const auto mb = slurp(b / "diag_chain" / "0" / "metrics.csv");
  EXPECT_EQ(without_wall_clock(ma), without_wall_clock(mb));
  EXPECT_NE(without_wall_clock(ma), without_wall_clock(slurp(a / "diag_chain" / "1" / "metrics.csv")));
  EXPECT_EQ(slurp(a / "diag_chain" / "0" / "buffer.buf"), slurp(b / "diag_chain" / "0" / "buffer.buf"));

  const auto rows = read_metrics_file((a / "diag_chain" / "0" / "metrics.csv").string());
  ASSERT_EQ(rows.size(), 40u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i].step, rows[i - 1].step);

  // compare: identical runs give zero differences; mean/std recomputed from raw CSVs.
  const auto ra = aggregate_run((a / "diag_chain").string());
  const auto rb = aggregate_run((b / "diag_chain").string());
  ASSERT_EQ(ra.seeds.size(), 2u);
  EXPECT_EQ(ra.strategy, "reaper_plus");
  for (std::size_t i = 0; i < ra.metrics.size(); ++i) {
    if (ra.metrics[i].first == "wall_ms") continue;
    EXPECT_EQ(ra.metrics[i].second.mean, rb.metrics[i].second.mean) << ra.metrics[i].first;
    EXPECT_EQ(ra.metrics[i].second.std, rb.metrics[i].second.std) << ra.metrics[i].first;
  }
  std::vector<double> finals;
  for (auto s : {0, 1}) {
    const auto r = read_metrics_file((a / "diag_chain" / std::to_string(s) / "metrics.csv").string());
    double sum = 0.0;
    for (std::size_t i = r.size() - 4; i < r.size(); ++i) sum += r[i].episode_return;
    finals.push_back(sum / 4.0);
  }
  const double mean = 0.5 * (finals[0] + finals[1]);
  const double sd = std::sqrt((finals[0] - mean) * (finals[0] - mean) + (finals[1] - mean) * (finals[1] - mean));
  EXPECT_NEAR(ra.metrics[0].second.mean, mean, 1e-12);
  EXPECT_NEAR(ra.metrics[0].second.std, sd, 1e-12);

  std::stringstream table;
  write_comparison(table, {ra, rb});
  std::string line;
  std::getline(table, line);
  EXPECT_EQ(line, "run,strategy,metric,mean,std,n,diff_vs_first");
  while (std::getline(table, line)) {
    if (line.find(",wall_ms,") != std::string::npos) continue;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
  }

  std::stringstream curves;
  write_learning_curves(curves, {ra});
  int n_lines = 0;
  while (std::getline(curves, line)) ++n_lines;
  EXPECT_EQ(n_lines, 41);

  const auto eval = evaluate_run(ca, (a / "diag_chain" / "0").string(), 0);
  EXPECT_FALSE(eval.empty());
  EXPECT_THROW(evaluate_run(ca, (a / "missing").string(), 0), IoError);
  EXPECT_THROW(aggregate_run((a / "missing").string()), IoError);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Runner, EveryStrategyCompletesOnTheChain) {
  for (auto s : {replay::Strategy::Uniform, replay::Strategy::HER, replay::Strategy::PER, replay::Strategy::ReaPER,
                 replay::Strategy::ReaPERPlus}) {
    ExperimentConfig c = preset("diag_chain", true);
    c.replay.strategy = s;
    ChainMdp env(c.chain);
    Trainer t(env, trainer_config(c, 3), 3);
    const auto rows = t.run(30);
    EXPECT_EQ(rows.size(), 30u);
  }
}
