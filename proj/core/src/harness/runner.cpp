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

#include "replayforge/harness/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "replayforge/compile/compile_env.hpp"
#include "replayforge/harness/chain_mdp.hpp"
#include "replayforge/qas/qas_env.hpp"

namespace rf::harness {

namespace fs = std::filesystem;

RunPaths run_paths(const std::string& run_dir) {
  const fs::path d(run_dir);
  return {d.string(),
          (d / "metrics.csv").string(),
          (d / "net.ckpt").string(),
          (d / "buffer.buf").string(),
          (d / "config.snapshot").string(),
          (d / "qas.csv").string()};
}

RunPaths run_paths(const std::string& output_dir, const std::string& preset, std::uint64_t seed) {
  return run_paths((fs::path(output_dir) / preset / std::to_string(seed)).string());
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config, bool noisy) {
  switch (config.kind) {
    case ExperimentKind::Compile: return std::make_unique<compile::CompileEnv>(config.compile);
    case ExperimentKind::Qas:
    case ExperimentKind::Transfer: return std::make_unique<qas::QasEnv>(qas_config(config, noisy));
    case ExperimentKind::Diag: return std::make_unique<ChainMdp>(config.chain);
  }
  throw ConfigError("unknown experiment kind");
}

TrainOutcome train_seed(const ExperimentConfig& config, std::uint64_t seed,
                        std::optional<replay::ReplayBuffer> warm_buffer) {
  TrainOutcome out;
  out.seed = seed;
  out.paths = run_paths(config.output_dir, config.preset.empty() ? kind_name(config.kind) : config.preset, seed);
  std::error_code ec;
  fs::create_directories(out.paths.dir, ec);
  if (ec) throw IoError("cannot create run directory " + out.paths.dir + ": " + ec.message());

  ExperimentConfig snapshot = config;
  snapshot.seeds = {seed};
  save_config(snapshot, out.paths.snapshot);

  const auto env = make_environment(config);
  const TrainerConfig tcfg = trainer_config(config, seed);
  std::unique_ptr<Trainer> trainer = warm_buffer
                                         ? std::make_unique<Trainer>(*env, tcfg, seed, std::move(*warm_buffer))
                                         : std::make_unique<Trainer>(*env, tcfg, seed);

  std::ofstream metrics(out.paths.metrics);
  if (!metrics) throw IoError("cannot write " + out.paths.metrics);
  write_metrics_header(metrics);
  metrics.flush();

  auto* qenv = dynamic_cast<qas::QasEnv*>(env.get());
  std::ofstream qas_csv;
  if (qenv) {
    qas_csv.open(out.paths.qas_metrics);
    if (!qas_csv) throw IoError("cannot write " + out.paths.qas_metrics);
    qas::write_qas_header(qas_csv);
  }

  const auto t0 = std::chrono::steady_clock::now();
  trainer->run(config.episodes, [&](const EpisodeMetrics& m) {
    write_metrics_row(metrics, m);
    metrics.flush();
    if (qenv) {
      const qas::EpisodeStats st = qenv->episode_stats();
      qas::QasEpisodeRow row;
      row.episode = m.episode;
      row.steps = st.steps;
      row.evals = st.evaluations;
      row.best_cost = st.best_cost;
      row.error_vs_exact = st.min_error;
      row.total_gates = st.total_gates;
      row.cnot = st.cnot_count;
      row.rot = st.rot_count;
      row.xi = qenv->curriculum().xi();
      row.epsilon = m.epsilon;
      row.wall_ms = m.wall_ms;
      qas::write_qas_row(qas_csv, row);
      qas_csv.flush();
    }
  });
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!metrics) throw IoError("failed writing " + out.paths.metrics);

  trainer->agent().online().save_file(out.paths.checkpoint);
  trainer->buffer().save(out.paths.buffer);
  out.episodes = trainer->episodes();
  out.steps = trainer->total_steps();
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw IoError("bad number in metrics file: " + s);
  return v;
}

}  // namespace

std::vector<EpisodeMetrics> read_metrics(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("metrics file is empty");
  const auto header = split_csv(line);
  static const std::vector<std::string> expected{"run_id", "episode", "step",    "length",      "return", "loss",
                                                 "epsilon", "omega_now", "success", "task_metric", "wall_ms"};
  if (header != expected) throw IoError("unexpected metrics header");
  std::vector<EpisodeMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != expected.size()) throw IoError("malformed metrics row: " + line);
    EpisodeMetrics m;
    m.run_id = c[0];
    m.episode = static_cast<std::int64_t>(parse_number(c[1]));
    m.step = static_cast<std::int64_t>(parse_number(c[2]));
    m.length = static_cast<int>(parse_number(c[3]));
    m.episode_return = parse_number(c[4]);
    m.loss = parse_number(c[5]);
    m.epsilon = parse_number(c[6]);
    m.omega_now = parse_number(c[7]);
    m.success = parse_number(c[8]) != 0.0;
    m.task_metric = parse_number(c[9]);
    m.wall_ms = parse_number(c[10]);
    rows.push_back(std::move(m));
  }
  return rows;
}

std::vector<EpisodeMetrics> read_metrics_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metrics file: " + path);
  return read_metrics(in);
}

std::vector<EvalRow> evaluate_run(const ExperimentConfig& config, const std::string& run_dir, std::uint64_t seed) {
  const RunPaths paths = run_paths(run_dir);
  if (!fs::exists(paths.checkpoint)) throw IoError("missing checkpoint: " + paths.checkpoint);
  const agent::QNetwork net = agent::QNetwork::load_file(paths.checkpoint);
  const auto env = make_environment(config);
  if (static_cast<std::size_t>(net.input_size()) != env->observation_size() ||
      static_cast<std::size_t>(net.output_size()) != env->action_count()) {
    throw ConfigError("checkpoint does not match the environment dimensions");
  }
  std::vector<EvalRow> rows;
  Rng rng(seed ^ 0x5eed5eedULL);

  if (config.kind == ExperimentKind::Compile) {
    const compile::Policy policy = [&net](std::span<const double> obs) {
      return static_cast<std::size_t>(agent::masked_argmax(net.forward(obs), {}));
    };
    const auto results = compile::evaluate(config.compile, policy, config.eval_targets, config.eval_tolerances, rng);
    for (const auto& r : results) {
      const std::string tag = "@" + format_double(r.tolerance);
      rows.push_back({seed, "success_rate" + tag, r.success_rate});
      rows.push_back({seed, "mean_fidelity" + tag, r.mean_fidelity});
      rows.push_back({seed, "mean_len" + tag, r.mean_len});
    }
    return rows;
  }

  std::vector<double> obs = env->reset(rng);
  double ret = 0.0;
  int steps = 0;
  bool success = false;
  for (;;) {
    const auto mask = env->legal_mask();
    const auto a = static_cast<std::size_t>(agent::masked_argmax(net.forward(obs), mask));
    const StepResult r = env->step(a, rng);
    ret += r.reward;
    ++steps;
    obs = r.observation;
    if (r.done) {
      success = r.success;
      break;
    }
  }
  rows.push_back({seed, "greedy_return", ret});
  rows.push_back({seed, "greedy_steps", static_cast<double>(steps)});
  rows.push_back({seed, "greedy_success", success ? 1.0 : 0.0});
  rows.push_back({seed, "task_metric", env->task_metric()});
  if (const auto* q = dynamic_cast<const qas::QasEnv*>(env.get())) {
    const auto st = q->episode_stats();
    rows.push_back({seed, "total_gates", static_cast<double>(st.total_gates)});
    rows.push_back({seed, "cnot", static_cast<double>(st.cnot_count)});
    rows.push_back({seed, "rot", static_cast<double>(st.rot_count)});
  }
  if (const auto* chain = dynamic_cast<const ChainMdp*>(env.get())) {
    const auto oracle = chain_q_values(chain->config(), config.agent.gamma);
    double err = 0.0;
    for (int p = 0; p + 1 < chain->config().length; ++p) {
      const auto q = net.forward(chain->observation(p));
      err = std::max({err, std::abs(q(0) - oracle[static_cast<std::size_t>(p)][0]),
                      std::abs(q(1) - oracle[static_cast<std::size_t>(p)][1])});
    }
    rows.push_back({seed, "max_q_error", err});
  }
  return rows;
}

SeedSummary summarize_seed(const std::vector<EpisodeMetrics>& rows, std::uint64_t seed) {
  SeedSummary s;
  s.seed = seed;
  if (rows.empty()) return s;
  const std::size_t n = rows.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double ret = 0.0, succ = 0.0, task = 0.0, all_succ = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) {
    ret += rows[i].episode_return;
    succ += rows[i].success ? 1.0 : 0.0;
    task += rows[i].task_metric;
  }
  for (const auto& r : rows) all_succ += r.success ? 1.0 : 0.0;
  s.final_return = ret / static_cast<double>(tail);
  s.final_success = succ / static_cast<double>(tail);
  s.final_task_metric = task / static_cast<double>(tail);
  s.success_rate = all_succ / static_cast<double>(n);
  s.total_steps = static_cast<double>(rows.back().step);
  for (const auto& r : rows) s.wall_ms += r.wall_ms;

  constexpr std::size_t window = 100;
  int in_window = 0;
  for (std::size_t i = 0; i < n; ++i) {
    in_window += rows[i].success ? 1 : 0;
    if (i >= window) in_window -= rows[i - window].success ? 1 : 0;
    if (i + 1 >= window && 2 * in_window >= static_cast<int>(window)) {
      s.episodes_to_half_success = rows[i].episode;
      break;
    }
  }
  return s;
}

double summary_metric(const SeedSummary& s, const std::string& name) {
  if (name == "final_return") return s.final_return;
  if (name == "success_rate") return s.success_rate;
  if (name == "final_success") return s.final_success;
  if (name == "final_task_metric") return s.final_task_metric;
  if (name == "total_steps") return s.total_steps;
  if (name == "wall_ms") return s.wall_ms;
  throw ConfigError("unknown summary metric: " + name);
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  a.n = values.size();
  if (values.empty()) return a;
  for (double v : values) a.mean += v;
  a.mean /= static_cast<double>(a.n);
  if (a.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std = std::sqrt(ss / static_cast<double>(a.n - 1));
  }
  return a;
}

RunAggregate aggregate_run(const std::string& run_dir) {
  if (!fs::is_directory(run_dir)) throw IoError("run directory not found: " + run_dir);
  std::vector<std::pair<std::uint64_t, fs::path>> seed_dirs;
  if (fs::exists(fs::path(run_dir) / "metrics.csv")) {
    const std::string name = fs::path(run_dir).lexically_normal().filename().string();
    std::uint64_t seed = 0;
    std::from_chars(name.data(), name.data() + name.size(), seed);
    seed_dirs.emplace_back(seed, fs::path(run_dir));
  } else {
    for (const auto& e : fs::directory_iterator(run_dir)) {
      if (!e.is_directory() || !fs::exists(e.path() / "metrics.csv")) continue;
      const std::string name = e.path().filename().string();
      std::uint64_t seed = 0;
      const auto r = std::from_chars(name.data(), name.data() + name.size(), seed);
      if (r.ec != std::errc() || r.ptr != name.data() + name.size()) continue;
      seed_dirs.emplace_back(seed, e.path());
    }
    std::sort(seed_dirs.begin(), seed_dirs.end());
  }
  if (seed_dirs.empty()) throw IoError("no metrics.csv found under " + run_dir);

  RunAggregate agg;
  agg.label = fs::path(run_dir).lexically_normal().string();
  const fs::path snap = seed_dirs.front().second / "config.snapshot";
  agg.strategy = fs::exists(snap) ? std::string(replay::strategy_name(load_config(snap.string()).replay.strategy))
                                  : "unknown";
  for (const auto& [seed, dir] : seed_dirs) {
    agg.rows.push_back(read_metrics_file((dir / "metrics.csv").string()));
    agg.seeds.push_back(summarize_seed(agg.rows.back(), seed));
  }
  for (const auto& name : summary_metric_names()) {
    std::vector<double> v;
    for (const auto& s : agg.seeds) v.push_back(summary_metric(s, name));
    agg.metrics.emplace_back(name, aggregate(v));
  }
  return agg;
}

void write_comparison(std::ostream& out, const std::vector<RunAggregate>& runs) {
  out << "run,strategy,metric,mean,std,n,diff_vs_first\n";
  for (const auto& r : runs) {
    for (std::size_t i = 0; i < r.metrics.size(); ++i) {
      const auto& [name, a] = r.metrics[i];
      const double diff = a.mean - runs.front().metrics[i].second.mean;
      out << r.label << ',' << r.strategy << ',' << name << ',' << format_double(a.mean) << ','
          << format_double(a.std) << ',' << a.n << ',' << format_double(diff) << '\n';
    }
  }
}

void write_learning_curves(std::ostream& out, const std::vector<RunAggregate>& runs) {
  out << "run,episode,mean_return,std_return,mean_success,mean_task_metric,n\n";
  for (const auto& r : runs) {
    std::size_t longest = 0;
    for (const auto& rows : r.rows) longest = std::max(longest, rows.size());
    for (std::size_t e = 0; e < longest; ++e) {
      std::vector<double> ret, succ, task;
      for (const auto& rows : r.rows) {
        if (e >= rows.size()) continue;
        ret.push_back(rows[e].episode_return);
        succ.push_back(rows[e].success ? 1.0 : 0.0);
        task.push_back(rows[e].task_metric);
      }
      const Aggregate a = aggregate(ret);
      out << r.label << ',' << e << ',' << format_double(a.mean) << ',' << format_double(a.std) << ','
          << format_double(aggregate(succ).mean) << ',' << format_double(aggregate(task).mean) << ',' << a.n << '\n';
    }
  }
}

std::string summary_json(const std::vector<RunAggregate>& runs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : runs) {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [name, a] : r.metrics) m[name] = {{"mean", a.mean}, {"std", a.std}, {"n", a.n}};
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& s : r.seeds) {
      seeds.push_back({{"seed", s.seed},
                       {"final_return", s.final_return},
                       {"success_rate", s.success_rate},
                       {"final_task_metric", s.final_task_metric},
                       {"episodes_to_half_success", s.episodes_to_half_success}});
    }
    j.push_back({{"run", r.label}, {"strategy", r.strategy}, {"metrics", m}, {"seeds", seeds}});
  }
  return j.dump(2);
}

}  // namespace rf::harness
