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

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "replayforge/env.hpp"
#include "replayforge/harness/config.hpp"
#include "replayforge/harness/trainer.hpp"
#include "replayforge/replay/buffer.hpp"

namespace rf::transfer {

inline constexpr std::array<double, 4> kDefaultWeights{0.4, 0.1, 0.2, 0.3};

/// Task error observed after an environment step, with the gate counts of
/// the circuit that produced it.
struct ErrorPoint {
  std::int64_t step = 0;
  double error = 0.0;
  int rot = 0;
  int cnot = 0;
};

/// First step at which the best-so-far error is <= threshold.
std::optional<std::int64_t> steps_to_threshold(const std::vector<ErrorPoint>& stream, double threshold);

struct Deltas {
  double steps = 0.0;
  double rot = 0.0;
  double cnot = 0.0;
  double err = 0.0;

  std::array<double, 4> as_array() const { return {steps, rot, cnot, err}; }
};

/// 100 (baseline - transfer) / baseline; 0 when both are 0, -100 when only
/// the baseline is 0.
double relative_delta(double baseline, double transfer);

/// S = w . delta
double score(const Deltas& deltas, const std::array<double, 4>& weights);

/// Summary of one training run as used for the deltas.
struct RunSummary {
  double steps = 0.0;  // steps to threshold, or the step budget plus one if never reached
  bool reached = false;
  double rot = 0.0;
  double cnot = 0.0;
  double err = 0.0;
};

/// At convergence: the run's own first crossing (or its best point).
RunSummary summarize_at_convergence(const std::vector<ErrorPoint>& stream, double threshold,
                                    std::int64_t total_steps);
/// Matched budget: only points at or before `budget` steps are considered.
RunSummary summarize_matched(const std::vector<ErrorPoint>& stream, double threshold, std::int64_t budget);

Deltas deltas_between(const RunSummary& baseline, const RunSummary& transfer);

struct SeedOutcome {
  std::uint64_t seed = 0;
  RunSummary transfer;
  RunSummary baseline;
  RunSummary transfer_matched;
  RunSummary baseline_matched;
  std::int64_t transfer_steps = 0;
  std::int64_t baseline_steps = 0;
  std::int64_t source_steps = 0;
  double source_ms = 0.0;
  double transfer_ms = 0.0;
  double baseline_ms = 0.0;
  std::vector<ErrorPoint> transfer_stream;
  std::vector<ErrorPoint> baseline_stream;
};

struct TransferReport {
  Deltas deltas;          // at convergence, from per-seed medians
  Deltas matched_deltas;  // matched step budget, from per-seed medians
  std::array<double, 4> weights = kDefaultWeights;
  double weight_sum = 1.0;
  double score = 0.0;
  double matched_score = 0.0;
  double median_steps_transfer = 0.0;
  double median_steps_baseline = 0.0;
  double threshold = 0.0;
  std::string source_buffer_file;
  std::string target_env;
  double noise_p1 = 0.0;
  double noise_p2 = 0.0;
  std::vector<SeedOutcome> seeds;
};

/// Aggregate per-seed outcomes into deltas and scores.
TransferReport make_report(std::vector<SeedOutcome> outcomes, const std::array<double, 4>& weights,
                           double threshold);

std::string report_json(const TransferReport& report);

struct TransferSetup {
  /// Builds the source (noisy = false) or target (noisy = true) environment.
  std::function<std::unique_ptr<Environment>(bool noisy)> make_env;
  /// Reads the error point after a step, nullopt to skip.
  std::function<std::optional<ErrorPoint>(std::int64_t step, const Environment& env)> probe;
  harness::TrainerConfig source;
  harness::TrainerConfig target;  // eps_start already lowered
  harness::TrainerConfig baseline;
  std::int64_t source_episodes = 0;
  std::int64_t target_episodes = 0;
  double threshold = 0.0;
  std::array<double, 4> weights = kDefaultWeights;
  /// Optional pre-recorded source buffer; skips source training.
  std::optional<replay::ReplayBuffer> source_buffer;
  /// Optional directory for per-seed source buffers.
  std::string buffer_out_dir;
};

/// Source training (or loaded buffer), warm-started target and a paired
/// from-scratch baseline for one seed.
SeedOutcome run_transfer_seed(const TransferSetup& setup, std::uint64_t seed);

TransferReport run_transfer(const TransferSetup& setup, const std::vector<std::uint64_t>& seeds);

/// Setup for a QAS experiment config: noiseless source, depolarizing target.
TransferSetup qas_transfer_setup(const harness::ExperimentConfig& config);

}  // namespace rf::transfer
