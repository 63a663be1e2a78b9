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

// rfq: train, evaluate, transfer, compare and report replay experiments.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "replayforge/harness/config.hpp"
#include "replayforge/harness/runner.hpp"
#include "replayforge/replay/buffer.hpp"
#include "replayforge/transfer/transfer.hpp"

namespace fs = std::filesystem;
using namespace rf;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kIo = 3, kNumeric = 4 };

struct Common {
  std::string config;
  std::string seeds;
  bool desk = false;
  std::string out;
  std::string noise;
  std::string strategy;
  std::string buffer_in;
  std::string buffer_out;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "preset name or config file");
  if (config_required) opt->required();
  cmd->add_option("--seeds", c.seeds, "seed count N (seeds 0..N-1) or a comma list");
  cmd->add_flag("--desk-scale", c.desk, "use the desk-scale variant of a preset");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--noise", c.noise, "depolarizing noise, p1=..,p2=..");
  cmd->add_option("--strategy", c.strategy, "uniform, her, per, reaper or reaper_plus");
  cmd->add_option("--buffer-in", c.buffer_in, "replay buffer file to warm start from");
  cmd->add_option("--buffer-out", c.buffer_out, "where to write the final replay buffer");
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || r.ec != std::errc() || r.ptr != part.data() + part.size()) {
      throw ConfigError("bad --seeds value: " + text);
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("bad --seeds value: " + text);
  if (text.find(',') == std::string::npos) {
    const std::uint64_t n = out.front();
    if (n == 0) throw ConfigError("--seeds count must be positive");
    out.clear();
    for (std::uint64_t s = 0; s < n; ++s) out.push_back(s);
  }
  return out;
}

std::pair<double, double> parse_noise(const std::string& text) {
  double p1 = 0.0, p2 = 0.0;
  bool have1 = false, have2 = false;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("bad --noise value: " + text);
    const std::string key = part.substr(0, eq), val = part.substr(eq + 1);
    double v = 0.0;
    const auto r = std::from_chars(val.data(), val.data() + val.size(), v);
    if (r.ec != std::errc() || r.ptr != val.data() + val.size() || v < 0.0 || v > 1.0) {
      throw ConfigError("bad --noise probability: " + part);
    }
    if (key == "p1") {
      p1 = v;
      have1 = true;
    } else if (key == "p2") {
      p2 = v;
      have2 = true;
    } else {
      throw ConfigError("unknown --noise key: " + key);
    }
  }
  if (!have1 && !have2) throw ConfigError("bad --noise value: " + text);
  return {p1, p2};
}

harness::ExperimentConfig resolve(const Common& c, const std::string& fallback = "") {
  const std::string name = c.config.empty() ? fallback : c.config;
  if (name.empty()) throw ConfigError("--config is required");
  harness::ExperimentConfig cfg = harness::resolve_config(name, c.desk);
  if (!c.seeds.empty()) cfg.seeds = parse_seeds(c.seeds);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (!c.strategy.empty()) {
    try {
      cfg.replay.strategy = replay::parse_strategy(c.strategy);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (!c.noise.empty()) {
    const auto [p1, p2] = parse_noise(c.noise);
    if (cfg.kind == harness::ExperimentKind::Transfer) {
      cfg.transfer.noise_p1 = p1;
      cfg.transfer.noise_p2 = p2;
    } else if (cfg.kind == harness::ExperimentKind::Qas) {
      cfg.qas.noise_p1 = p1;
      cfg.qas.noise_p2 = p2;
    } else {
      throw ConfigError("--noise applies to qas and transfer experiments only");
    }
  }
  if (cfg.preset.empty()) cfg.preset = kind_name(cfg.kind);
  cfg.validate();
  return cfg;
}

std::string per_seed_path(const std::string& path, std::uint64_t seed, std::size_t n_seeds) {
  if (n_seeds == 1) return path;
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + std::to_string(seed) + p.extension().string())).string();
}

int cmd_train(const Common& c, bool print_config) {
  const auto cfg = resolve(c);
  if (print_config) {
    std::cout << harness::to_text(cfg);
    return kOk;
  }
  std::optional<replay::ReplayBuffer> warm;
  if (!c.buffer_in.empty()) warm = replay::ReplayBuffer::load(c.buffer_in);
  for (const auto seed : cfg.seeds) {
    const auto out = harness::train_seed(cfg, seed, warm);
    if (!c.buffer_out.empty()) {
      const std::string dst = per_seed_path(c.buffer_out, seed, cfg.seeds.size());
      if (fs::path(dst).has_parent_path()) fs::create_directories(fs::path(dst).parent_path());
      fs::copy_file(out.paths.buffer, dst, fs::copy_options::overwrite_existing);
    }
    std::cout << "seed " << seed << ": " << out.episodes << " episodes, " << out.steps << " steps, "
              << std::fixed << std::setprecision(2) << out.wall_ms / 1000.0 << std::defaultfloat << " s -> " << out.paths.dir << "\n";
  }
  return kOk;
}

int cmd_eval(const Common& c) {
  const auto cfg = resolve(c);
  std::cout << "seed,metric,value\n";
  for (const auto seed : cfg.seeds) {
    const auto paths = harness::run_paths(cfg.output_dir, cfg.preset, seed);
    const auto rows = harness::evaluate_run(cfg, paths.dir, seed);
    std::ofstream out((fs::path(paths.dir) / "eval.csv").string());
    if (!out) throw IoError("cannot write eval.csv in " + paths.dir);
    out << "seed,metric,value\n";
    for (const auto& r : rows) {
      out << r.seed << ',' << r.metric << ',' << format_double(r.value) << '\n';
      std::cout << r.seed << ',' << r.metric << ',' << format_double(r.value) << '\n';
    }
  }
  return kOk;
}

int cmd_transfer(const Common& c) {
  auto cfg = resolve(c, "transfer_heisenberg_3q");
  if (cfg.kind != harness::ExperimentKind::Transfer && cfg.kind != harness::ExperimentKind::Qas) {
    throw ConfigError("transfer needs a qas or transfer config");
  }
  auto setup = transfer::qas_transfer_setup(cfg);
  if (!c.buffer_in.empty()) {
    if (!fs::exists(c.buffer_in)) throw IoError("source buffer not found: " + c.buffer_in);
    setup.source_buffer = replay::ReplayBuffer::load(c.buffer_in);
  }
  if (!c.buffer_out.empty()) setup.buffer_out_dir = c.buffer_out;
  auto report = transfer::run_transfer(setup, cfg.seeds);
  report.source_buffer_file = c.buffer_in;
  report.target_env = cfg.preset + " (p1=" + format_double(cfg.transfer.noise_p1) +
                      ", p2=" + format_double(cfg.transfer.noise_p2) + ")";
  report.noise_p1 = cfg.transfer.noise_p1;
  report.noise_p2 = cfg.transfer.noise_p2;
  const fs::path dir = fs::path(cfg.output_dir) / cfg.preset;
  fs::create_directories(dir);
  const std::string json = transfer::report_json(report);
  std::ofstream out((dir / "transfer_report.json").string());
  if (!out) throw IoError("cannot write " + (dir / "transfer_report.json").string());
  out << json << '\n';
  std::cout << json << '\n';
  return kOk;
}

std::vector<harness::RunAggregate> load_runs(const std::vector<std::string>& dirs) {
  std::vector<harness::RunAggregate> runs;
  for (const auto& d : dirs) runs.push_back(harness::aggregate_run(d));
  return runs;
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& out_file) {
  const auto runs = load_runs(dirs);
  harness::write_comparison(std::cout, runs);
  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) throw IoError("cannot write " + out_file);
    harness::write_comparison(out, runs);
  }
  return kOk;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_dir) {
  const auto runs = load_runs(dirs);
  const fs::path dir(out_dir.empty() ? "report" : out_dir);
  fs::create_directories(dir);
  std::ofstream curves((dir / "learning_curves.csv").string());
  std::ofstream table((dir / "comparison.csv").string());
  std::ofstream summary((dir / "summary.json").string());
  if (!curves || !table || !summary) throw IoError("cannot write report files in " + dir.string());
  harness::write_learning_curves(curves, runs);
  harness::write_comparison(table, runs);
  summary << harness::summary_json(runs) << '\n';
  std::cout << "wrote " << (dir / "learning_curves.csv").string() << ", " << (dir / "comparison.csv").string()
            << ", " << (dir / "summary.json").string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rfq: replay-centric RL for quantum circuit optimization"};
  app.require_subcommand(1);

  Common train_opts, eval_opts, transfer_opts;
  bool print_config = false;
  auto* train = app.add_subcommand("train", "train one config over all seeds");
  add_common(train, train_opts, true);
  train->add_flag("--print-config", print_config, "print the resolved config and exit");

  auto* eval = app.add_subcommand("eval", "evaluate trained checkpoints");
  add_common(eval, eval_opts, true);

  auto* xfer = app.add_subcommand("transfer", "noiseless-to-noisy buffer transfer");
  add_common(xfer, transfer_opts, false);
  xfer->add_option("--source", transfer_opts.buffer_in, "source buffer file (same as --buffer-in)");

  std::vector<std::string> compare_dirs, report_dirs;
  std::string compare_out, report_out;
  auto* compare = app.add_subcommand("compare", "side-by-side table of run directories");
  compare->add_option("runs", compare_dirs, "run directories")->required();
  compare->add_option("--out", compare_out, "also write the table to this file");
  auto* report = app.add_subcommand("report", "plot-ready CSV and JSON for run directories");
  report->add_option("runs", report_dirs, "run directories")->required();
  report->add_option("--out", report_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(train_opts, print_config);
    if (*eval) return cmd_eval(eval_opts);
    if (*xfer) return cmd_transfer(transfer_opts);
    if (*compare) return cmd_compare(compare_dirs, compare_out);
    if (*report) return cmd_report(report_dirs, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
