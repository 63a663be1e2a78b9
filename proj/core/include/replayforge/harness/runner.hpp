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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "replayforge/env.hpp"
#include "replayforge/harness/config.hpp"
#include "replayforge/harness/trainer.hpp"
#include "replayforge/replay/buffer.hpp"

namespace rf::harness {

/// out/<preset>/<seed>/{metrics.csv, net.ckpt, buffer.buf, config.snapshot}
struct RunPaths {
  std::string dir;
  std::string metrics;
  std::string checkpoint;
  std::string buffer;
  std::string snapshot;
  std::string qas_metrics;  // qas.csv, QAS runs only
};

RunPaths run_paths(const std::string& output_dir, const std::string& preset, std::uint64_t seed);
RunPaths run_paths(const std::string& run_dir);

/// Environment for a config; `noisy` selects the transfer target noise.
std::unique_ptr<Environment> make_environment(const ExperimentConfig& config, bool noisy = false);

struct TrainOutcome {
  std::uint64_t seed = 0;
  RunPaths paths;
  std::int64_t episodes = 0;
  std::int64_t steps = 0;
  double wall_ms = 0.0;
};

/// Train one seed, writing metrics (flushed per episode), the final
/// checkpoint, the buffer and the config snapshot.
TrainOutcome train_seed(const ExperimentConfig& config, std::uint64_t seed,
                        std::optional<replay::ReplayBuffer> warm_buffer = std::nullopt);

std::vector<EpisodeMetrics> read_metrics(std::istream& in);
std::vector<EpisodeMetrics> read_metrics_file(const std::string& path);

struct EvalRow {
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

/// Greedy evaluation of a trained run directory. Compile runs report the
/// success rate per tolerance on fresh targets; QAS and chain runs report
/// the greedy episode outcome.
std::vector<EvalRow> evaluate_run(const ExperimentConfig& config, const std::string& run_dir, std::uint64_t seed);

/// Per-seed summary metrics drawn from one metrics.csv.
struct SeedSummary {
  std::uint64_t seed = 0;
  double final_return = 0.0;    // mean return over the last 10% of episodes
  double success_rate = 0.0;    // over all episodes
  double final_success = 0.0;   // over the last 10% of episodes
  double final_task_metric = 0.0;
  double total_steps = 0.0;
  double wall_ms = 0.0;
  std::int64_t episodes_to_half_success = -1;  // first episode whose trailing-100 success rate reaches 0.5
};

SeedSummary summarize_seed(const std::vector<EpisodeMetrics>& rows, std::uint64_t seed);

inline const std::vector<std::string>& summary_metric_names() {
  static const std::vector<std::string> names{"final_return",      "success_rate", "final_success",
                                              "final_task_metric", "total_steps",  "wall_ms"};
  return names;
}
double summary_metric(const SeedSummary& s, const std::string& name);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single seed
  std::size_t n = 0;
};
Aggregate aggregate(const std::vector<double>& values);

/// One run directory (a preset directory with seed subdirectories, or a
/// single seed directory) aggregated over seeds.
struct RunAggregate {
  std::string label;
  std::string strategy;
  std::vector<SeedSummary> seeds;
  std::vector<std::vector<EpisodeMetrics>> rows;  // per seed, in seed order
  std::vector<std::pair<std::string, Aggregate>> metrics;
};

RunAggregate aggregate_run(const std::string& run_dir);

/// Side-by-side table: run,strategy,metric,mean,std,n,diff_vs_first.
void write_comparison(std::ostream& out, const std::vector<RunAggregate>& runs);

/// Plot-ready learning curves: run,episode,mean_return,std_return,
/// mean_success,mean_task_metric,n over the seeds of each run.
void write_learning_curves(std::ostream& out, const std::vector<RunAggregate>& runs);
std::string summary_json(const std::vector<RunAggregate>& runs);

}  // namespace rf::harness
