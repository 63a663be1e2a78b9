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

#include "replayforge/transfer/transfer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include <nlohmann/json.hpp>

#include "replayforge/qas/qas_env.hpp"

namespace rf::transfer {

std::optional<std::int64_t> steps_to_threshold(const std::vector<ErrorPoint>& stream, double threshold) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : stream) {
    best = std::min(best, p.error);
    if (best <= threshold) return p.step;
  }
  return std::nullopt;
}

double relative_delta(double baseline, double transfer) {
  if (baseline == 0.0) return transfer == 0.0 ? 0.0 : -100.0;
  return 100.0 * (baseline - transfer) / baseline;
}

double score(const Deltas& d, const std::array<double, 4>& w) {
  return w[0] * d.steps + w[1] * d.rot + w[2] * d.cnot + w[3] * d.err;
}

namespace {

RunSummary summarize(const std::vector<ErrorPoint>& stream, double threshold, std::int64_t budget) {
  RunSummary s;
  s.steps = static_cast<double>(budget + 1);
  const ErrorPoint* best = nullptr;
  for (const auto& p : stream) {
    if (p.step > budget) break;
    if (!best || p.error < best->error) best = &p;
    if (best->error <= threshold) {
      s.reached = true;
      s.steps = static_cast<double>(p.step);
      break;
    }
  }
  if (best) {
    s.err = best->error;
    s.rot = best->rot;
    s.cnot = best->cnot;
  } else {
    s.err = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RunSummary median_summary(const std::vector<SeedOutcome>& outs, RunSummary SeedOutcome::*field) {
  std::vector<double> steps, rot, cnot, err;
  for (const auto& o : outs) {
    const RunSummary& s = o.*field;
    steps.push_back(s.steps);
    rot.push_back(s.rot);
    cnot.push_back(s.cnot);
    err.push_back(s.err);
  }
  RunSummary m;
  m.steps = median(steps);
  m.rot = median(rot);
  m.cnot = median(cnot);
  m.err = median(err);
  return m;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunSummary summarize_at_convergence(const std::vector<ErrorPoint>& stream, double threshold,
                                    std::int64_t total_steps) {
  return summarize(stream, threshold, total_steps);
}

RunSummary summarize_matched(const std::vector<ErrorPoint>& stream, double threshold, std::int64_t budget) {
  return summarize(stream, threshold, budget);
}

Deltas deltas_between(const RunSummary& b, const RunSummary& t) {
  return {relative_delta(b.steps, t.steps), relative_delta(b.rot, t.rot), relative_delta(b.cnot, t.cnot),
          relative_delta(b.err, t.err)};
}

TransferReport make_report(std::vector<SeedOutcome> outcomes, const std::array<double, 4>& weights,
                           double threshold) {
  if (outcomes.empty()) throw ConfigError("transfer report needs at least one paired baseline run");
  TransferReport r;
  r.weights = weights;
  r.weight_sum = weights[0] + weights[1] + weights[2] + weights[3];
  r.threshold = threshold;
  const RunSummary t = median_summary(outcomes, &SeedOutcome::transfer);
  const RunSummary b = median_summary(outcomes, &SeedOutcome::baseline);
  r.deltas = deltas_between(b, t);
  r.matched_deltas = deltas_between(median_summary(outcomes, &SeedOutcome::baseline_matched),
                                    median_summary(outcomes, &SeedOutcome::transfer_matched));
  r.score = score(r.deltas, weights);
  r.matched_score = score(r.matched_deltas, weights);
  r.median_steps_transfer = t.steps;
  r.median_steps_baseline = b.steps;
  r.seeds = std::move(outcomes);
  return r;
}

namespace {

nlohmann::json deltas_json(const Deltas& d) {
  return {{"steps", d.steps}, {"rot", d.rot}, {"cnot", d.cnot}, {"err", d.err}};
}

nlohmann::json summary_json(const RunSummary& s) {
  nlohmann::json j = {{"steps", s.steps}, {"reached", s.reached}, {"rot", s.rot}, {"cnot", s.cnot}};
  j["err"] = std::isfinite(s.err) ? nlohmann::json(s.err) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::string report_json(const TransferReport& r) {
  nlohmann::json j;
  j["source_buffer_file"] = r.source_buffer_file;
  j["target_env"] = r.target_env;
  j["noise"] = {{"p1", r.noise_p1}, {"p2", r.noise_p2}};
  j["threshold"] = r.threshold;
  j["deltas"] = deltas_json(r.deltas);
  j["weights"] = r.weights;
  j["weight_sum"] = r.weight_sum;
  j["score"] = r.score;
  j["matched_budget"] = {{"deltas", deltas_json(r.matched_deltas)}, {"score", r.matched_score}};
  j["median_steps_to_threshold"] = {{"transfer", r.median_steps_transfer}, {"baseline", r.median_steps_baseline}};
  nlohmann::json seeds = nlohmann::json::array();
  nlohmann::json runs = nlohmann::json::array();
  nlohmann::json rt = {{"source", nlohmann::json::array()},
                       {"transfer", nlohmann::json::array()},
                       {"baseline", nlohmann::json::array()}};
  for (const auto& s : r.seeds) {
    seeds.push_back(s.seed);
    runs.push_back({{"seed", s.seed},
                    {"transfer", summary_json(s.transfer)},
                    {"baseline", summary_json(s.baseline)},
                    {"transfer_matched", summary_json(s.transfer_matched)},
                    {"baseline_matched", summary_json(s.baseline_matched)},
                    {"transfer_steps", s.transfer_steps},
                    {"baseline_steps", s.baseline_steps},
                    {"source_steps", s.source_steps}});
    rt["source"].push_back(s.source_ms);
    rt["transfer"].push_back(s.transfer_ms);
    rt["baseline"].push_back(s.baseline_ms);
  }
  j["seeds"] = seeds;
  j["runs"] = runs;
  j["runtimes_ms"] = rt;
  return j.dump(2);
}

namespace {

struct TracedRun {
  std::vector<ErrorPoint> stream;
  std::int64_t steps = 0;
  double ms = 0.0;
};

TracedRun traced(const TransferSetup& setup, harness::Trainer& trainer, std::int64_t episodes) {
  TracedRun run;
  trainer.set_step_hook([&](std::int64_t step, const StepResult&, const Environment& env) {
    if (auto p = setup.probe(step, env)) run.stream.push_back(*p);
  });
  const auto t0 = std::chrono::steady_clock::now();
  trainer.run(episodes);
  run.ms = elapsed_ms(t0);
  run.steps = trainer.total_steps();
  trainer.set_step_hook({});
  return run;
}

}  // namespace

SeedOutcome run_transfer_seed(const TransferSetup& setup, std::uint64_t seed) {
  if (!setup.make_env || !setup.probe) throw ConfigError("transfer setup needs an environment factory and a probe");
  SeedOutcome out;
  out.seed = seed;

  const auto target_env = setup.make_env(true);
  replay::ReplayBuffer source = [&] {
    if (setup.source_buffer) return *setup.source_buffer;
    const auto env = setup.make_env(false);
    if (env->observation_size() != target_env->observation_size() ||
        env->action_count() != target_env->action_count()) {
      throw ConfigError("source and target environments differ in state or action space");
    }
    harness::Trainer src(*env, setup.source, seed);
    const auto t0 = std::chrono::steady_clock::now();
    src.run(setup.source_episodes);
    out.source_ms = elapsed_ms(t0);
    out.source_steps = src.total_steps();
    return src.buffer();
  }();
  source.require_compatible(static_cast<std::uint32_t>(target_env->observation_size()),
                            static_cast<std::uint32_t>(target_env->action_count()));
  if (!setup.buffer_out_dir.empty()) {
    std::filesystem::create_directories(setup.buffer_out_dir);
    source.save((std::filesystem::path(setup.buffer_out_dir) / ("source_" + std::to_string(seed) + ".buf")).string());
  }

  harness::Trainer warm(*target_env, setup.target, seed, std::move(source));
  TracedRun t = traced(setup, warm, setup.target_episodes);

  const auto base_env = setup.make_env(true);
  harness::Trainer cold(*base_env, setup.baseline, seed);
  TracedRun b = traced(setup, cold, setup.target_episodes);

  out.transfer_steps = t.steps;
  out.baseline_steps = b.steps;
  out.transfer_ms = t.ms;
  out.baseline_ms = b.ms;
  out.transfer = summarize_at_convergence(t.stream, setup.threshold, t.steps);
  out.baseline = summarize_at_convergence(b.stream, setup.threshold, b.steps);
  const std::int64_t budget = std::min(t.steps, b.steps);
  out.transfer_matched = summarize_matched(t.stream, setup.threshold, budget);
  out.baseline_matched = summarize_matched(b.stream, setup.threshold, budget);
  out.transfer_stream = std::move(t.stream);
  out.baseline_stream = std::move(b.stream);
  return out;
}

TransferReport run_transfer(const TransferSetup& setup, const std::vector<std::uint64_t>& seeds) {
  std::vector<SeedOutcome> outs;
  outs.reserve(seeds.size());
  for (const auto s : seeds) outs.push_back(run_transfer_seed(setup, s));
  return make_report(std::move(outs), setup.weights, setup.threshold);
}

TransferSetup qas_transfer_setup(const harness::ExperimentConfig& config) {
  TransferSetup s;
  const qas::QasConfig source_cfg = harness::qas_config(config, false);
  const qas::QasConfig target_cfg = harness::qas_config(config, true);
  s.make_env = [source_cfg, target_cfg](bool noisy) -> std::unique_ptr<Environment> {
    return std::make_unique<qas::QasEnv>(noisy ? target_cfg : source_cfg);
  };
  s.probe = [](std::int64_t step, const Environment& env) -> std::optional<ErrorPoint> {
    const auto& q = dynamic_cast<const qas::QasEnv&>(env);
    const qas::EpisodeStats g = qas::count_gates(q.state());
    return ErrorPoint{step, q.task_metric(), g.rot_count, g.cnot_count};
  };
  s.source = harness::trainer_config(config, config.seeds.empty() ? 0 : config.seeds.front());
  s.baseline = s.source;
  s.target = s.source;
  s.target.agent.eps_start = std::max(config.transfer.eps_start, s.target.agent.eps_min);
  s.source_episodes = config.transfer.source_episodes;
  s.target_episodes = config.transfer.target_episodes;
  s.threshold = config.transfer.threshold;
  s.weights = config.transfer.weights;
  return s;
}

}  // namespace rf::transfer
