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

#include "replayforge/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

extern char** environ;

namespace rf::harness {

namespace pt = boost::property_tree;

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Compile: return "compile";
    case ExperimentKind::Qas: return "qas";
    case ExperimentKind::Transfer: return "transfer";
    case ExperimentKind::Diag: return "diag";
  }
  return "compile";
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "compile") return ExperimentKind::Compile;
  if (name == "qas") return ExperimentKind::Qas;
  if (name == "transfer") return ExperimentKind::Transfer;
  if (name == "diag") return ExperimentKind::Diag;
  throw ConfigError("unknown experiment kind: " + name);
}

replay::BufferConfig ReplaySection::buffer_config() const {
  replay::BufferConfig b;
  b.strategy = strategy;
  b.capacity = capacity;
  b.spec.alpha = alpha ? *alpha : (strategy == replay::Strategy::PER ? 0.6 : 0.4);
  b.spec.omega = omega;
  b.spec.beta0 = beta0;
  b.spec.beta_anneal_frames = beta_anneal_frames;
  b.spec.epsilon_priority = epsilon_priority;
  b.schedule.omega_min = omega_min;
  b.schedule.omega_max = omega_max;
  b.schedule.t_ann = t_ann;
  return b;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  if (her_k < 0) throw ConfigError("her_k must be >= 0");
  if (replay.capacity == 0) throw ConfigError("replay capacity must be positive");
  try {
    agent.validate();
    const auto b = replay.buffer_config();
    b.spec.validate();
    b.schedule.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (double t : eval_tolerances)
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("evaluation tolerances must lie in (0,1)");
  switch (kind) {
    case ExperimentKind::Compile: compile.validate(); break;
    case ExperimentKind::Diag: chain.validate(); break;
    case ExperimentKind::Transfer:
      if (transfer.eps_start < 0.0 || transfer.eps_start > 1.0) throw ConfigError("transfer eps_start out of range");
      if (transfer.noise_p1 < 0.0 || transfer.noise_p1 > 1.0 || transfer.noise_p2 < 0.0 || transfer.noise_p2 > 1.0)
        throw ConfigError("transfer noise out of range");
      [[fallthrough]];
    case ExperimentKind::Qas:
      qas.optimizer.validate();
      qas.curriculum.validate();
      if (qas.m < 1 || qas.max_steps < 1 || qas.max_layers < 1 || qas.n_qubits < 1)
        throw ConfigError("qas sizes must be positive");
      break;
  }
}

namespace {

// ---- scalar formatting and parsing

std::string fmt(double v) { return format_double(v); }
template <class I>
std::string fmt_int(I v) {
  return std::to_string(v);
}
std::string fmt(bool v) { return v ? "true" : "false"; }

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("bad number for " + key + ": " + s);
  return v;
}
std::int64_t to_int(const std::string& key, const std::string& s) {
  std::int64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("bad integer for " + key + ": " + s);
  return v;
}
bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean for " + key + ": " + s);
}
std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}
template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + f(v[i]);
  return out;
}

std::string strategy_key(replay::Strategy s) { return std::string(replay::strategy_name(s)); }

std::string loss_name(agent::LossKind l) { return l == agent::LossKind::Huber ? "huber" : "squared"; }
agent::LossKind parse_loss(const std::string& s) {
  if (s == "huber") return agent::LossKind::Huber;
  if (s == "squared") return agent::LossKind::Squared;
  throw ConfigError("unknown loss: " + s);
}
std::string sync_name(agent::SyncMode m) { return m == agent::SyncMode::Steps ? "steps" : "episodes"; }
agent::SyncMode parse_sync(const std::string& s) {
  if (s == "steps") return agent::SyncMode::Steps;
  if (s == "episodes") return agent::SyncMode::Episodes;
  throw ConfigError("unknown sync mode: " + s);
}
std::string gateset_name(compile::GateSet g) {
  switch (g) {
    case compile::GateSet::SmallRotations1Q: return "small_rotations_1q";
    case compile::GateSet::HRC1Q: return "hrc_1q";
    case compile::GateSet::TwoQubit: return "two_qubit";
  }
  return "";
}
std::string reward_name(compile::RewardMode r) { return r == compile::RewardMode::Dense ? "dense" : "sparse"; }
std::string target_name(compile::TargetMode t) {
  switch (t) {
    case compile::TargetMode::Haar: return "haar";
    case compile::TargetMode::RandomCircuit: return "random_circuit";
    case compile::TargetMode::Algorithm1: return "algorithm1";
  }
  return "";
}
std::string fidelity_name(qcore::FidelityKind k) {
  return k == qcore::FidelityKind::TraceAbs ? "trace_abs" : "trace_squared";
}
qcore::FidelityKind parse_fidelity(const std::string& s) {
  if (s == "trace_abs") return qcore::FidelityKind::TraceAbs;
  if (s == "trace_squared") return qcore::FidelityKind::TraceSquared;
  throw ConfigError("unknown fidelity kind: " + s);
}
std::string decay_name(DecayUnit d) { return d == DecayUnit::Step ? "step" : "episode"; }
std::string optimizer_name(qas::OptimizerMethod m) {
  return m == qas::OptimizerMethod::NelderMead ? "nelder_mead" : "param_shift_adam";
}
std::string activation_key(agent::Activation a) { return std::string(agent::activation_name(a)); }

// ---- reading with unknown-key detection

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& path) {
    used_.insert(path);
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'));
    if (!v) return std::nullopt;
    return *v;
  }
  void str(const std::string& path, std::string& out) {
    if (auto v = raw(path)) out = *v;
  }
  void num(const std::string& path, double& out) {
    if (auto v = raw(path)) out = to_double(path, *v);
  }
  template <class I>
  void integer(const std::string& path, I& out) {
    if (auto v = raw(path)) {
      const std::int64_t x = to_int(path, *v);
      if constexpr (std::is_unsigned_v<I>) {
        if (x < 0) throw ConfigError(path + " must be non-negative");
      }
      out = static_cast<I>(x);
    }
  }
  void flag(const std::string& path, bool& out) {
    if (auto v = raw(path)) out = to_bool(path, *v);
  }
  void opt_num(const std::string& path, std::optional<double>& out) {
    if (auto v = raw(path)) out = (*v == "auto" || v->empty()) ? std::nullopt : std::optional(to_double(path, *v));
  }
  template <class F>
  void with(const std::string& path, F f) {
    if (auto v = raw(path)) f(*v);
  }

  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) throw ConfigError("key outside a section: " + section);
      for (const auto& [key, value] : body) {
        (void)value;
        const std::string path = section + "." + key;
        if (!used_.count(path)) throw ConfigError("unknown config key: " + path);
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::set<std::string> used_;
};

pt::ptree to_tree(const ExperimentConfig& c) {
  pt::ptree t;
  auto put = [&t](const std::string& path, const std::string& v) { t.put(pt::ptree::path_type(path, '.'), v); };
  put("experiment.kind", kind_name(c.kind));
  put("experiment.preset", c.preset);
  put("experiment.desk_scale", fmt(c.desk_scale));
  put("experiment.seeds", join(c.seeds, [](std::uint64_t s) { return fmt_int(s); }));
  put("experiment.output_dir", c.output_dir);
  put("experiment.episodes", fmt_int(c.episodes));
  put("experiment.eps_decay_unit", decay_name(c.eps_decay_unit));
  put("experiment.her_k", fmt_int(c.her_k));
  put("experiment.eval_targets", fmt_int(c.eval_targets));
  put("experiment.eval_tolerances", join(c.eval_tolerances, [](double d) { return fmt(d); }));

  const auto& a = c.agent;
  put("agent.gamma", fmt(a.gamma));
  put("agent.lr", fmt(a.lr));
  put("agent.batch_size", fmt_int(a.batch_size));
  put("agent.sync_mode", sync_name(a.sync_mode));
  put("agent.sync_period", fmt_int(a.sync_period));
  put("agent.grad_clip", fmt(a.grad_clip));
  put("agent.eps_start", fmt(a.eps_start));
  put("agent.eps_min", fmt(a.eps_min));
  put("agent.eps_decay", fmt(a.eps_decay));
  put("agent.n_step", fmt_int(a.n_step));
  put("agent.double_q", fmt(a.double_q));
  put("agent.loss", loss_name(a.loss));
  put("agent.hidden", join(a.hidden, [](int h) { return fmt_int(h); }));
  put("agent.activation", activation_key(a.activation));
  put("agent.learn_start", fmt_int(a.learn_start));
  put("agent.train_every", fmt_int(a.train_every));

  const auto& r = c.replay;
  put("replay.strategy", strategy_key(r.strategy));
  put("replay.capacity", fmt_int(r.capacity));
  put("replay.alpha", r.alpha ? fmt(*r.alpha) : "auto");
  put("replay.omega", fmt(r.omega));
  put("replay.beta0", fmt(r.beta0));
  put("replay.beta_anneal_frames", fmt_int(r.beta_anneal_frames));
  put("replay.epsilon_priority", fmt(r.epsilon_priority));
  put("replay.omega_min", fmt(r.omega_min));
  put("replay.omega_max", fmt(r.omega_max));
  put("replay.t_ann", fmt_int(r.t_ann));

  if (c.kind == ExperimentKind::Compile) {
    const auto& k = c.compile;
    put("compile.n_qubits", fmt_int(k.n_qubits));
    put("compile.gateset", gateset_name(k.gateset));
    put("compile.tolerance", fmt(k.tolerance));
    put("compile.max_len", fmt_int(k.max_len));
    put("compile.reward_mode", reward_name(k.reward_mode));
    put("compile.fidelity", fidelity_name(k.fidelity));
    put("compile.target_mode", target_name(k.target_mode));
    put("compile.target_min_len", fmt_int(k.target_min_len));
    put("compile.target_max_len", fmt_int(k.target_max_len));

  }
  if (c.kind == ExperimentKind::Qas || c.kind == ExperimentKind::Transfer) {
    const auto& q = c.qas;
    put("qas.n_qubits", fmt_int(q.n_qubits));
    put("qas.max_layers", fmt_int(q.max_layers));
    put("qas.encoding", q.encoding == qas::Encoding::I ? "I" : "II");
    put("qas.hamiltonian", q.hamiltonian);
    put("qas.m", fmt_int(q.m));
    put("qas.max_steps", fmt_int(q.max_steps));
    put("qas.c_min", q.c_min ? fmt(*q.c_min) : "auto");
    put("qas.reference_energy", q.reference_energy ? fmt(*q.reference_energy) : "auto");
    put("qas.noise_p1", fmt(q.noise_p1));
    put("qas.noise_p2", fmt(q.noise_p2));
    put("qas.trajectories", fmt_int(q.trajectories));
    put("qas.optimizer", optimizer_name(q.optimizer.method));
    put("qas.max_iter", fmt_int(q.optimizer.max_iter));
    put("qas.warm_start", fmt(q.optimizer.warm_start));
    put("qas.initial_step", fmt(q.optimizer.initial_step));
    put("qas.adam_lr", fmt(q.optimizer.adam_lr));
    put("qas.optimizer_tolerance", fmt(q.optimizer.tolerance));

    const auto& cu = c.qas.curriculum;
    put("curriculum.xi0", fmt(cu.xi0));
    put("curriculum.shift_ball", fmt(cu.shift_ball));
    put("curriculum.shift_time", fmt_int(cu.shift_time));
    put("curriculum.success_switch", fmt(cu.success_switch));
    put("curriculum.success_threshold", fmt_int(cu.success_threshold));
    put("curriculum.margin", fmt(cu.margin));
    put("curriculum.xi_min", fmt(cu.xi_min));
  }
  if (c.kind == ExperimentKind::Diag) {
    put("chain.length", fmt_int(c.chain.length));
    put("chain.slip", fmt(c.chain.slip));
    put("chain.max_steps", fmt_int(c.chain.max_steps));
  }
  if (c.kind == ExperimentKind::Transfer) {
    const auto& x = c.transfer;
    put("transfer.source_episodes", fmt_int(x.source_episodes));
    put("transfer.target_episodes", fmt_int(x.target_episodes));
    put("transfer.eps_start", fmt(x.eps_start));
    put("transfer.noise_p1", fmt(x.noise_p1));
    put("transfer.noise_p2", fmt(x.noise_p2));
    put("transfer.threshold", fmt(x.threshold));
    put("transfer.weights", join(std::vector<double>(x.weights.begin(), x.weights.end()), [](double d) { return fmt(d); }));
    put("transfer.source_buffer", x.source_buffer);
    put("transfer.target_xi0", x.target_xi0 ? fmt(*x.target_xi0) : "auto");
  }
  return t;
}

ExperimentConfig from_tree(const pt::ptree& t) {
  ExperimentConfig c;
  Reader r(t);
  r.with("experiment.kind", [&](const std::string& s) { c.kind = parse_kind(s); });
  r.str("experiment.preset", c.preset);
  r.flag("experiment.desk_scale", c.desk_scale);
  r.with("experiment.seeds", [&](const std::string& s) {
    c.seeds.clear();
    for (const auto& p : split(s)) {
      const auto v = to_int("experiment.seeds", p);
      if (v < 0) throw ConfigError("seeds must be non-negative");
      c.seeds.push_back(static_cast<std::uint64_t>(v));
    }
  });
  r.str("experiment.output_dir", c.output_dir);
  r.integer("experiment.episodes", c.episodes);
  r.with("experiment.eps_decay_unit", [&](const std::string& s) { c.eps_decay_unit = parse_decay_unit(s); });
  r.integer("experiment.her_k", c.her_k);
  r.integer("experiment.eval_targets", c.eval_targets);
  r.with("experiment.eval_tolerances", [&](const std::string& s) {
    c.eval_tolerances.clear();
    for (const auto& p : split(s)) c.eval_tolerances.push_back(to_double("experiment.eval_tolerances", p));
  });

  auto& a = c.agent;
  r.num("agent.gamma", a.gamma);
  r.num("agent.lr", a.lr);
  r.integer("agent.batch_size", a.batch_size);
  r.with("agent.sync_mode", [&](const std::string& s) { a.sync_mode = parse_sync(s); });
  r.integer("agent.sync_period", a.sync_period);
  r.num("agent.grad_clip", a.grad_clip);
  r.num("agent.eps_start", a.eps_start);
  r.num("agent.eps_min", a.eps_min);
  r.num("agent.eps_decay", a.eps_decay);
  r.integer("agent.n_step", a.n_step);
  r.flag("agent.double_q", a.double_q);
  r.with("agent.loss", [&](const std::string& s) { a.loss = parse_loss(s); });
  r.with("agent.hidden", [&](const std::string& s) {
    a.hidden.clear();
    for (const auto& p : split(s)) {
      const auto h = to_int("agent.hidden", p);
      if (h < 1) throw ConfigError("hidden sizes must be positive");
      a.hidden.push_back(static_cast<int>(h));
    }
  });
  r.with("agent.activation", [&](const std::string& s) {
    try {
      a.activation = agent::parse_activation(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  });
  r.integer("agent.learn_start", a.learn_start);
  r.integer("agent.train_every", a.train_every);

  auto& rp = c.replay;
  r.with("replay.strategy", [&](const std::string& s) {
    try {
      rp.strategy = replay::parse_strategy(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  });
  r.integer("replay.capacity", rp.capacity);
  r.opt_num("replay.alpha", rp.alpha);
  r.num("replay.omega", rp.omega);
  r.num("replay.beta0", rp.beta0);
  r.integer("replay.beta_anneal_frames", rp.beta_anneal_frames);
  r.num("replay.epsilon_priority", rp.epsilon_priority);
  r.num("replay.omega_min", rp.omega_min);
  r.num("replay.omega_max", rp.omega_max);
  r.integer("replay.t_ann", rp.t_ann);

  auto& k = c.compile;
  r.integer("compile.n_qubits", k.n_qubits);
  r.with("compile.gateset", [&](const std::string& s) { k.gateset = compile::parse_gateset(s); });
  r.num("compile.tolerance", k.tolerance);
  r.integer("compile.max_len", k.max_len);
  r.with("compile.reward_mode", [&](const std::string& s) { k.reward_mode = compile::parse_reward_mode(s); });
  r.with("compile.fidelity", [&](const std::string& s) { k.fidelity = parse_fidelity(s); });
  r.with("compile.target_mode", [&](const std::string& s) { k.target_mode = compile::parse_target_mode(s); });
  r.integer("compile.target_min_len", k.target_min_len);
  r.integer("compile.target_max_len", k.target_max_len);

  auto& q = c.qas;
  r.integer("qas.n_qubits", q.n_qubits);
  r.integer("qas.max_layers", q.max_layers);
  r.with("qas.encoding", [&](const std::string& s) { q.encoding = qas::parse_encoding(s); });
  r.str("qas.hamiltonian", q.hamiltonian);
  r.integer("qas.m", q.m);
  r.integer("qas.max_steps", q.max_steps);
  r.opt_num("qas.c_min", q.c_min);
  r.opt_num("qas.reference_energy", q.reference_energy);
  r.num("qas.noise_p1", q.noise_p1);
  r.num("qas.noise_p2", q.noise_p2);
  r.integer("qas.trajectories", q.trajectories);
  r.with("qas.optimizer", [&](const std::string& s) { q.optimizer.method = qas::parse_optimizer(s); });
  r.integer("qas.max_iter", q.optimizer.max_iter);
  r.flag("qas.warm_start", q.optimizer.warm_start);
  r.num("qas.initial_step", q.optimizer.initial_step);
  r.num("qas.adam_lr", q.optimizer.adam_lr);
  r.num("qas.optimizer_tolerance", q.optimizer.tolerance);

  auto& cu = q.curriculum;
  r.num("curriculum.xi0", cu.xi0);
  r.num("curriculum.shift_ball", cu.shift_ball);
  r.integer("curriculum.shift_time", cu.shift_time);
  r.num("curriculum.success_switch", cu.success_switch);
  r.integer("curriculum.success_threshold", cu.success_threshold);
  r.num("curriculum.margin", cu.margin);
  r.num("curriculum.xi_min", cu.xi_min);

  r.integer("chain.length", c.chain.length);
  r.num("chain.slip", c.chain.slip);
  r.integer("chain.max_steps", c.chain.max_steps);

  auto& x = c.transfer;
  r.integer("transfer.source_episodes", x.source_episodes);
  r.integer("transfer.target_episodes", x.target_episodes);
  r.num("transfer.eps_start", x.eps_start);
  r.num("transfer.noise_p1", x.noise_p1);
  r.num("transfer.noise_p2", x.noise_p2);
  r.num("transfer.threshold", x.threshold);
  r.with("transfer.weights", [&](const std::string& s) {
    const auto parts = split(s);
    if (parts.size() != 4) throw ConfigError("transfer.weights needs four values");
    for (std::size_t i = 0; i < 4; ++i) x.weights[i] = to_double("transfer.weights", parts[i]);
  });
  r.str("transfer.source_buffer", x.source_buffer);
  r.opt_num("transfer.target_xi0", x.target_xi0);

  r.reject_unknown();
  c.validate();
  return c;
}

pt::ptree read_tree(std::istream& in) {
  pt::ptree t;
  try {
    pt::read_ini(in, t);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return t;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) { return from_tree(read_tree(in)); }

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse_config(in);
}

std::string to_text(const ExperimentConfig& config) {
  std::ostringstream out;
  pt::write_ini(out, to_tree(config));
  return out.str();
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << to_text(config);
  if (!out) throw IoError("failed writing config file: " + path);
}

std::string apply_overrides(const std::string& text, const std::map<std::string, std::string>& overrides) {
  std::istringstream in(text);
  pt::ptree t = read_tree(in);
  for (const auto& [key, value] : overrides) {
    std::string path = key;
    const auto sep = path.find("__");
    if (sep == std::string::npos) throw ConfigError("override key needs <section>__<key>: " + key);
    path.replace(sep, 2, ".");
    t.put(pt::ptree::path_type(path, '.'), value);
  }
  std::ostringstream out;
  pt::write_ini(out, t);
  return out.str();
}

std::map<std::string, std::string> environment_overrides() {
  static const std::string prefix = "RF_OVERRIDE_";
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    out[entry.substr(prefix.size(), eq - prefix.size())] = entry.substr(eq + 1);
  }
  return out;
}

// ---- presets

namespace {

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

ExperimentConfig compile_base(bool desk) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Compile;
  c.agent.gamma = 0.99;
  c.agent.lr = 3e-4;
  c.agent.batch_size = 200;
  c.agent.sync_mode = agent::SyncMode::Episodes;
  c.agent.sync_period = 100;
  c.agent.grad_clip = 1.0;
  c.agent.eps_start = 1.0;
  c.agent.eps_min = 0.01;
  c.agent.eps_decay = 0.99931;
  c.agent.hidden = {128, 128};
  c.agent.activation = agent::Activation::ReLU;
  c.replay.strategy = replay::Strategy::ReaPERPlus;
  c.replay.capacity = 500000;
  c.eps_decay_unit = DecayUnit::Episode;
  c.her_k = 5;
  c.episodes = 50000;
  c.seeds = seed_range(40);
  c.eval_targets = 100000;
  c.eval_tolerances = {0.99, 0.999, 0.9999};
  c.compile.tolerance = 0.99;
  c.compile.max_len = 130;
  if (desk) {
    c.desk_scale = true;
    c.episodes = 3000;
    c.seeds = seed_range(3);
    c.eval_targets = 500;
    c.agent.batch_size = 64;
    c.agent.hidden = {64, 64};
    c.agent.lr = 1e-3;
    c.agent.eps_decay = 0.998;
    c.agent.eps_min = 0.05;
    c.agent.sync_mode = agent::SyncMode::Steps;
    c.agent.sync_period = 500;
    c.agent.train_every = 2;
    c.agent.learn_start = 500;
    c.replay.capacity = 100000;
    c.replay.t_ann = 100000;
    c.replay.beta_anneal_frames = 50000;
  }
  return c;
}

ExperimentConfig qas_base(int n, bool desk) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Qas;
  c.qas.n_qubits = n;
  c.qas.hamiltonian = "heisenberg";
  c.qas.encoding = qas::Encoding::I;
  c.agent.gamma = 0.005;
  c.agent.lr = 3e-4;
  c.agent.batch_size = 1000;
  c.agent.sync_mode = agent::SyncMode::Steps;
  c.agent.sync_period = 500;
  c.agent.eps_start = 1.0;
  c.agent.eps_min = 0.05;
  c.agent.eps_decay = 0.99995;
  c.agent.n_step = 5;
  c.agent.double_q = true;
  c.agent.hidden = {1000, 1000, 1000};
  c.replay.strategy = replay::Strategy::ReaPERPlus;
  c.replay.capacity = 20000;
  c.eps_decay_unit = DecayUnit::Step;
  c.episodes = 5000;
  c.seeds = seed_range(3);
  c.qas.max_layers = 70;
  c.qas.max_steps = 70;
  c.qas.m = 10;
  c.qas.optimizer.max_iter = 1000;
  c.qas.curriculum.xi0 = 5.5;
  c.qas.curriculum.success_switch = 5.5;
  c.qas.curriculum.shift_ball = 0.001;
  c.qas.curriculum.shift_time = 2000;
  c.qas.curriculum.success_threshold = 50;
  if (desk) {
    c.desk_scale = true;
    c.episodes = 300;
    c.agent.hidden = {128, 128};
    c.agent.batch_size = 64;
    c.agent.lr = 1e-3;
    c.agent.sync_period = 100;
    c.agent.eps_decay = 0.999;
    c.agent.learn_start = 200;
    c.qas.max_layers = 6 * n;
    c.qas.max_steps = 6 * n;
    c.qas.m = 5;
    c.qas.optimizer.max_iter = 300;
    c.qas.curriculum.xi0 = 1.0;
    c.qas.curriculum.success_switch = 1.0;
    c.qas.curriculum.shift_time = 50;
    c.qas.curriculum.shift_ball = 0.01;
    c.qas.curriculum.success_threshold = 5;
    c.qas.curriculum.xi_min = qas::kChemicalAccuracy;
  }
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"compile_1q_smallrot", "compile_1q_hrc",        "compile_2q",           "qas_heisenberg_2q",
          "qas_heisenberg_3q",   "qas_heisenberg_4q",     "qas_heisenberg_5q",    "transfer_heisenberg_3q",
          "diag_chain"};
}

ExperimentConfig preset(const std::string& name, bool desk) {
  ExperimentConfig c;
  if (name == "compile_1q_smallrot") {
    c = compile_base(desk);
    c.compile.gateset = compile::GateSet::SmallRotations1Q;
    c.compile.reward_mode = compile::RewardMode::Dense;
    c.compile.target_mode = compile::TargetMode::Haar;
    if (desk) {
      c.compile.target_mode = compile::TargetMode::RandomCircuit;
      c.compile.target_min_len = 1;
      c.compile.target_max_len = 20;
      c.compile.tolerance = 0.9;
      c.eval_tolerances = {0.9};
    }
  } else if (name == "compile_1q_hrc") {
    c = compile_base(desk);
    c.compile.gateset = compile::GateSet::HRC1Q;
    c.compile.reward_mode = compile::RewardMode::Sparse;
    c.compile.target_mode = compile::TargetMode::Haar;
    if (desk) c.eval_tolerances = {0.99};
  } else if (name == "compile_2q") {
    c = compile_base(desk);
    c.compile.n_qubits = 2;
    c.compile.gateset = compile::GateSet::TwoQubit;
    c.compile.reward_mode = compile::RewardMode::Dense;
    c.compile.target_mode = compile::TargetMode::Algorithm1;
    if (desk) {
      c.compile.target_mode = compile::TargetMode::RandomCircuit;
      c.compile.target_min_len = 1;
      c.compile.target_max_len = 20;
      c.compile.tolerance = 0.9;
      c.eval_tolerances = {0.9};
    }
  } else if (name.rfind("qas_heisenberg_", 0) == 0 && name.size() == 17 && name[16] == 'q' && name[15] >= '2' &&
             name[15] <= '5') {
    c = qas_base(name[15] - '0', desk);
  } else if (name == "transfer_heisenberg_3q") {
    c = qas_base(3, desk);
    c.kind = ExperimentKind::Transfer;
    c.replay.strategy = replay::Strategy::Uniform;
    c.seeds = seed_range(5);
    c.transfer.eps_start = 0.55;
    c.transfer.noise_p1 = 0.001;
    c.transfer.noise_p2 = 0.005;
    c.transfer.source_episodes = desk ? 300 : 5000;
    c.transfer.target_episodes = desk ? 100 : 5000;
    c.transfer.threshold = desk ? 150 * qas::kChemicalAccuracy : qas::kChemicalAccuracy;
  } else if (name == "diag_chain") {
    c.kind = ExperimentKind::Diag;
    c.chain.length = 6;
    c.chain.slip = 0.0;
    c.agent.gamma = 0.9;
    c.agent.lr = 1e-3;
    c.agent.batch_size = 32;
    c.agent.hidden = {32, 32};
    c.agent.sync_mode = agent::SyncMode::Steps;
    c.agent.sync_period = 50;
    c.agent.eps_decay = 0.99;
    c.agent.eps_min = 0.1;
    c.agent.loss = agent::LossKind::Squared;
    c.replay.capacity = 10000;
    c.replay.t_ann = 3000;
    c.replay.beta_anneal_frames = 2000;
    c.eps_decay_unit = DecayUnit::Episode;
    c.episodes = desk ? 500 : 2000;
    c.seeds = seed_range(desk ? 3 : 10);
    c.desk_scale = desk;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  c.preset = name;
  c.output_dir = "out";
  c.validate();
  return c;
}

ExperimentConfig resolve_config(const std::string& name_or_path, bool desk_scale) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(name_or_path, ec)) {
    std::ifstream in(name_or_path);
    if (!in) throw IoError("cannot open config file: " + name_or_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(apply_overrides(buf.str(), environment_overrides()));
  }
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), name_or_path) == names.end()) {
    if (name_or_path.find('/') != std::string::npos || name_or_path.find(".ini") != std::string::npos) {
      throw IoError("config file not found: " + name_or_path);
    }
    throw ConfigError("unknown preset: " + name_or_path);
  }
  return parse_config_text(apply_overrides(to_text(preset(name_or_path, desk_scale)), environment_overrides()));
}

TrainerConfig trainer_config(const ExperimentConfig& c, std::uint64_t seed) {
  TrainerConfig t;
  t.agent = c.agent;
  t.replay = c.replay.buffer_config();
  t.her_k = c.her_k;
  t.eps_decay_unit = c.eps_decay_unit;
  t.run_id = c.preset + "/" + std::to_string(seed);
  return t;
}

qcore::PauliSumHamiltonian load_hamiltonian(const QasSection& q) {
  if (q.hamiltonian == "heisenberg") return qcore::heisenberg_hamiltonian(q.n_qubits);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(q.hamiltonian, ec)) throw IoError("hamiltonian file not found: " + q.hamiltonian);
  auto h = qcore::PauliSumHamiltonian::load(q.hamiltonian);
  if (h.n_qubits() != q.n_qubits) throw ConfigError("hamiltonian qubit count does not match qas.n_qubits");
  return h;
}

qas::QasConfig qas_config(const ExperimentConfig& c, bool noisy) {
  qas::QasConfig q;
  q.name = c.preset;
  q.n_qubits = c.qas.n_qubits;
  q.max_layers = c.qas.max_layers;
  q.encoding = c.qas.encoding;
  q.hamiltonian = load_hamiltonian(c.qas);
  q.m = c.qas.m;
  q.max_steps = c.qas.max_steps;
  q.c_min = c.qas.c_min;
  q.reference_energy = c.qas.reference_energy;
  const double p1 = noisy ? c.transfer.noise_p1 : c.qas.noise_p1;
  const double p2 = noisy ? c.transfer.noise_p2 : c.qas.noise_p2;
  if (p1 > 0.0 || p2 > 0.0) q.noise = qcore::NoiseModel{p1, p2};
  q.trajectories = c.qas.trajectories;
  q.optimizer = c.qas.optimizer;
  q.curriculum = c.qas.curriculum;
  if (noisy && c.transfer.target_xi0) q.curriculum.xi0 = *c.transfer.target_xi0;
  return q;
}

}  // namespace rf::harness
