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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "replayforge/agent/dqn.hpp"
#include "replayforge/compile/compile_env.hpp"
#include "replayforge/harness/chain_mdp.hpp"
#include "replayforge/harness/trainer.hpp"
#include "replayforge/qas/qas_env.hpp"
#include "replayforge/replay/priority.hpp"

namespace rf::harness {

enum class ExperimentKind { Compile, Qas, Transfer, Diag };

std::string kind_name(ExperimentKind k);
ExperimentKind parse_kind(const std::string& name);

struct ReplaySection {
  replay::Strategy strategy = replay::Strategy::ReaPERPlus;
  std::size_t capacity = 500000;
  std::optional<double> alpha;  // unset: 0.6 for PER, 0.4 for ReaPER and ReaPER+
  double omega = 0.2;
  double beta0 = 0.4;
  std::int64_t beta_anneal_frames = 100000;
  double epsilon_priority = 1e-6;
  double omega_min = 0.1;
  double omega_max = 0.7;
  std::int64_t t_ann = 500000;

  replay::BufferConfig buffer_config() const;
};

struct QasSection {
  int n_qubits = 3;
  int max_layers = 20;
  qas::Encoding encoding = qas::Encoding::I;
  std::string hamiltonian = "heisenberg";  // or a Hamiltonian file path
  int m = 5;
  int max_steps = 20;
  std::optional<double> c_min;
  std::optional<double> reference_energy;
  double noise_p1 = 0.0;
  double noise_p2 = 0.0;
  int trajectories = 256;
  qas::VqeOptimizerConfig optimizer;
  qas::CurriculumConfig curriculum;
};

struct TransferSection {
  std::int64_t source_episodes = 1000;
  std::int64_t target_episodes = 1000;
  double eps_start = 0.55;
  double noise_p1 = 0.001;
  double noise_p2 = 0.005;
  double threshold = qas::kChemicalAccuracy;  // energy error defining "reached"
  std::array<double, 4> weights{0.4, 0.1, 0.2, 0.3};
  std::string source_buffer;              // empty: train a source run first
  std::optional<double> target_xi0;       // tightened curriculum for the noisy run
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Compile;
  std::string preset = "custom";
  bool desk_scale = false;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "out";
  std::int64_t episodes = 1000;
  DecayUnit eps_decay_unit = DecayUnit::Episode;
  int her_k = 5;
  std::size_t eval_targets = 1000;
  std::vector<double> eval_tolerances{0.99};

  agent::AgentConfig agent;
  ReplaySection replay;
  compile::CompileConfig compile;
  QasSection qas;
  ChainConfig chain;
  TransferSection transfer;

  void validate() const;
};

/// INI text with sections experiment, agent, replay, compile, qas,
/// curriculum, chain and transfer. Unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string to_text(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::string& path);

/// Apply `RF_OVERRIDE_<section>__<key>=value` pairs on top of `text`.
std::string apply_overrides(const std::string& text, const std::map<std::string, std::string>& overrides);
/// The RF_OVERRIDE_* entries of the process environment.
std::map<std::string, std::string> environment_overrides();

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name, bool desk_scale);
/// A preset name or a path to an INI file.
ExperimentConfig resolve_config(const std::string& name_or_path, bool desk_scale);

TrainerConfig trainer_config(const ExperimentConfig& config, std::uint64_t seed);
qcore::PauliSumHamiltonian load_hamiltonian(const QasSection& section);
qas::QasConfig qas_config(const ExperimentConfig& config, bool noisy);

}  // namespace rf::harness
