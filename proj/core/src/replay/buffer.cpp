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

#include "replayforge/replay/buffer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rf::replay {
namespace {

constexpr char kMagic[4] = {'R', 'P', 'B', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ostream& out, std::uint64_t v, int n) {
  char b[8];
  for (int i = 0; i < n; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, n);
}

void put_u8(std::ostream& out, std::uint8_t v) { put_bytes(out, v, 1); }
void put_u32(std::ostream& out, std::uint32_t v) { put_bytes(out, v, 4); }
void put_u64(std::ostream& out, std::uint64_t v) { put_bytes(out, v, 8); }
void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint64_t get_bytes(std::istream& in, int n) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), n)) throw IoError("replay buffer stream is truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::uint8_t get_u8(std::istream& in) { return static_cast<std::uint8_t>(get_bytes(in, 1)); }
std::uint32_t get_u32(std::istream& in) { return static_cast<std::uint32_t>(get_bytes(in, 4)); }
std::uint64_t get_u64(std::istream& in) { return get_bytes(in, 8); }
float get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

void write_record(std::ostream& out, const Transition& t) {
  for (float x : t.state) put_f32(out, x);
  put_u32(out, t.action);
  put_f32(out, t.reward);
  for (float x : t.next_state) put_f32(out, x);
  put_u8(out, t.done ? 1 : 0);
  put_u32(out, t.episode_id);
  put_u32(out, t.step);
}

Transition read_record(std::istream& in, std::uint32_t dim) {
  Transition t;
  t.state.resize(dim);
  for (auto& x : t.state) x = get_f32(in);
  t.action = get_u32(in);
  t.reward = get_f32(in);
  t.next_state.resize(dim);
  for (auto& x : t.next_state) x = get_f32(in);
  const std::uint8_t done = get_u8(in);
  if (done > 1) throw IoError("corrupt done flag in replay buffer record");
  t.done = done == 1;
  t.episode_id = get_u32(in);
  t.step = get_u32(in);
  return t;
}

bool uses_reliability(Strategy s) { return s == Strategy::ReaPER || s == Strategy::ReaPERPlus; }

}  // namespace

ReplayBuffer::ReplayBuffer(BufferConfig config) : cfg_(std::move(config)) {
  if (cfg_.capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  if (cfg_.state_dim == 0) throw std::invalid_argument("replay state_dim must be positive");
  if (cfg_.action_count == 0) throw std::invalid_argument("replay action_count must be positive");
  cfg_.spec.validate();
  if (cfg_.strategy == Strategy::ReaPERPlus) cfg_.schedule.validate();
  if (is_prioritized(cfg_.strategy)) tree_.emplace(cfg_.capacity);
  omega_built_ = omega_now();
}

double ReplayBuffer::omega_now() const {
  switch (cfg_.strategy) {
    case Strategy::ReaPER: return cfg_.spec.omega;
    case Strategy::ReaPERPlus: return omega_at(cfg_.schedule, frames_);
    default: return 0.0;
  }
}

std::size_t ReplayBuffer::add(Transition t, bool count_frame) {
  if (t.state.size() != cfg_.state_dim || t.next_state.size() != cfg_.state_dim) {
    throw std::invalid_argument("transition state dimension " + std::to_string(t.state.size()) +
                                " does not match buffer dimension " + std::to_string(cfg_.state_dim));
  }
  if (t.action >= cfg_.action_count) throw std::invalid_argument("transition action out of range");

  const std::size_t s = head_;
  if (size_ == cfg_.capacity) {
    const std::uint32_t old_ep = data_[s].episode_id;
    auto it = episodes_.find(old_ep);
    if (it != episodes_.end()) {
      auto& slots = it->second;
      slots.erase(std::remove(slots.begin(), slots.end(), s), slots.end());
      if (slots.empty()) {
        episodes_.erase(it);
        stale_.erase(old_ep);
      }
    }
  }
  const std::uint32_t ep = t.episode_id;
  if (s < data_.size()) {
    data_[s] = std::move(t);
    td_plus_[s] = max_td_;
    reliability_[s] = 1.0;
  } else {
    data_.push_back(std::move(t));
    td_plus_.push_back(max_td_);
    reliability_.push_back(1.0);
  }
  episodes_[ep].push_back(s);
  next_episode_id_ = std::max(next_episode_id_, ep + 1);
  if (tree_) tree_->set(s, max_priority_);

  head_ = (head_ + 1) % cfg_.capacity;
  size_ = std::min(size_ + 1, cfg_.capacity);
  if (count_frame) ++frames_;
  return s;
}

std::size_t ReplayBuffer::slot_of(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index out of range");
  return size_ < cfg_.capacity ? i : (head_ + i) % cfg_.capacity;
}

const Transition& ReplayBuffer::at(std::size_t i) const { return data_[slot_of(i)]; }

const Transition& ReplayBuffer::slot(std::size_t s) const {
  if (s >= size_) throw std::out_of_range("replay slot out of range");
  return data_[s];
}

double ReplayBuffer::priority(std::size_t s) const {
  if (s >= size_) throw std::out_of_range("replay slot out of range");
  return tree_ ? tree_->get(s) : 1.0;
}

void ReplayBuffer::refresh_slot(std::size_t s) {
  if (!tree_) return;
  const double p = priority_value(cfg_.strategy, td_plus_[s], reliability_[s], cfg_.spec, omega_built_);
  tree_->set(s, p);
  max_priority_ = std::max(max_priority_, p);
}

void ReplayBuffer::refresh_all() {
  if (!tree_) return;
  for (std::size_t s = 0; s < size_; ++s) refresh_slot(s);
}

void ReplayBuffer::maybe_rebuild_for_omega() {
  if (cfg_.strategy != Strategy::ReaPERPlus) return;
  const double w = omega_now();
  if (std::abs(w - omega_built_) < 1e-3) return;
  omega_built_ = w;
  refresh_all();
}

void ReplayBuffer::recompute_episode(std::uint32_t episode_id) {
  const auto it = episodes_.find(episode_id);
  if (it == episodes_.end()) return;
  const auto& slots = it->second;
  std::vector<double> d(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) d[i] = td_plus_[slots[i]] + cfg_.spec.epsilon_priority;
  const std::vector<double> r = reliability_scores(d);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    reliability_[slots[i]] = r[i];
    refresh_slot(slots[i]);
  }
  stale_.erase(episode_id);
}

SampledBatch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) {
  if (size_ == 0) throw std::invalid_argument("cannot sample from an empty replay buffer");
  if (batch_size > size_) throw std::invalid_argument("batch larger than replay buffer");
  SampledBatch out;
  out.indices.reserve(batch_size);
  out.items.reserve(batch_size);
  out.is_weights.assign(batch_size, 1.0);
  if (tree_) {
    maybe_rebuild_for_omega();
    const double total = tree_->total();
    const double beta = beta_now();
    const double n = static_cast<double>(size_);
    std::uniform_real_distribution<double> u(0.0, total);
    double w_max = 0.0;
    for (std::size_t b = 0; b < batch_size; ++b) {
      const std::size_t s = tree_->find(u(rng));
      out.indices.push_back(s);
      const double mu = tree_->get(s) / total;
      out.is_weights[b] = std::pow(n * mu, -beta);
      w_max = std::max(w_max, out.is_weights[b]);
    }
    for (auto& w : out.is_weights) w /= w_max;
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
    for (std::size_t b = 0; b < batch_size; ++b) out.indices.push_back(slot_of(pick(rng)));
  }
  if (uses_reliability(cfg_.strategy) && !stale_.empty()) {
    for (std::size_t s : out.indices) {
      const std::uint32_t ep = data_[s].episode_id;
      if (stale_.count(ep)) recompute_episode(ep);
    }
  }
  for (std::size_t s : out.indices) out.items.push_back(&data_[s]);
  return out;
}

void ReplayBuffer::update_td(std::span<const std::size_t> slots, std::span<const double> td_plus) {
  if (slots.size() != td_plus.size()) throw std::invalid_argument("update_td: length mismatch");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::size_t s = slots[i];
    if (s >= size_) throw std::out_of_range("update_td: slot out of range");
    const double v = td_plus[i];
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("update_td: TD magnitude must be finite and >= 0");
    td_plus_[s] = v;
    max_td_ = std::max(max_td_, v);
    if (uses_reliability(cfg_.strategy)) stale_.insert(data_[s].episode_id);
    refresh_slot(s);
  }
}

void ReplayBuffer::on_episode_end(std::uint32_t episode_id) {
  if (!episodes_.count(episode_id)) throw std::out_of_range("unknown episode id " + std::to_string(episode_id));
  if (!uses_reliability(cfg_.strategy)) return;
  maybe_rebuild_for_omega();
  recompute_episode(episode_id);
}

std::vector<std::size_t> ReplayBuffer::episode_slots(std::uint32_t episode_id) const {
  const auto it = episodes_.find(episode_id);
  if (it == episodes_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

void ReplayBuffer::reset_priorities() {
  for (std::size_t s = 0; s < size_; ++s) {
    td_plus_[s] = max_td_;
    reliability_[s] = 1.0;
    if (tree_) tree_->set(s, max_priority_);
  }
  stale_.clear();
}

void ReplayBuffer::require_compatible(std::uint32_t state_dim, std::uint32_t action_count) const {
  if (state_dim != cfg_.state_dim || action_count != cfg_.action_count) {
    throw ConfigError("replay buffer dimensions (state " + std::to_string(cfg_.state_dim) + ", actions " +
                      std::to_string(cfg_.action_count) + ") do not match environment (state " +
                      std::to_string(state_dim) + ", actions " + std::to_string(action_count) + ")");
  }
}

void ReplayBuffer::serialize(std::ostream& out) const {
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u8(out, static_cast<std::uint8_t>(cfg_.strategy));
  put_u32(out, cfg_.state_dim);
  put_u32(out, cfg_.action_count);
  put_u64(out, size_);
  put_u32(out, static_cast<std::uint32_t>(cfg_.env_id.size()));
  out.write(cfg_.env_id.data(), static_cast<std::streamsize>(cfg_.env_id.size()));
  put_u64(out, cfg_.capacity);
  for (std::size_t i = 0; i < size_; ++i) write_record(out, at(i));
  if (!out) throw IoError("failed writing replay buffer");
}

ReplayBuffer ReplayBuffer::deserialize(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw IoError("replay buffer stream is truncated");
  if (!std::equal(magic, magic + 4, kMagic)) throw IoError("not a replay buffer file (bad magic)");
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) throw IoError("unsupported replay buffer version " + std::to_string(version));
  const std::uint8_t tag = get_u8(in);
  if (tag > static_cast<std::uint8_t>(Strategy::ReaPERPlus)) throw IoError("unknown strategy tag");
  BufferConfig cfg;
  cfg.strategy = static_cast<Strategy>(tag);
  cfg.state_dim = get_u32(in);
  cfg.action_count = get_u32(in);
  const std::uint64_t count = get_u64(in);
  const std::uint32_t id_len = get_u32(in);
  if (id_len > (1u << 16)) throw IoError("implausible env-id length");
  cfg.env_id.resize(id_len);
  if (id_len && !in.read(cfg.env_id.data(), id_len)) throw IoError("replay buffer stream is truncated");
  cfg.capacity = get_u64(in);
  if (count > cfg.capacity) throw IoError("record count exceeds capacity");
  if (cfg.state_dim == 0 || cfg.action_count == 0 || cfg.capacity == 0) throw IoError("corrupt replay header");
  ReplayBuffer buf(std::move(cfg));
  for (std::uint64_t i = 0; i < count; ++i) {
    Transition t = read_record(in, buf.cfg_.state_dim);
    if (t.action >= buf.cfg_.action_count) throw IoError("record action out of range");
    buf.add(std::move(t), false);
  }
  return buf;
}

void ReplayBuffer::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  serialize(out);
}

ReplayBuffer ReplayBuffer::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open replay buffer file " + path);
  return deserialize(in);
}

void transfer_into(const ReplayBuffer& source, ReplayBuffer& target, bool keep_priorities) {
  target.require_compatible(source.config().state_dim, source.config().action_count);
  std::vector<std::size_t> slots;
  std::vector<double> tds;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const std::size_t src_slot = source.slot_of(i);
    const std::size_t s = target.add(source.at(i), false);
    if (keep_priorities) {
      slots.push_back(s);
      tds.push_back(source.td_plus(src_slot));
    }
  }
  if (keep_priorities) target.update_td(slots, tds);
  target.set_frames(0);
}

ReplayBuffer transfer_buffer(const ReplayBuffer& source, bool keep_priorities) {
  ReplayBuffer target(source.config());
  transfer_into(source, target, keep_priorities);
  return target;
}

std::string transition_section(const ReplayBuffer& buffer) {
  std::ostringstream os(std::ios::binary);
  for (std::size_t i = 0; i < buffer.size(); ++i) write_record(os, buffer.at(i));
  return os.str();
}

std::vector<Transition> her_relabel(const Episode& episode, int k, const RelabelFn& relabel, Rng& rng) {
  if (k < 0) throw std::invalid_argument("her_relabel: k must be >= 0");
  const auto& ts = episode.transitions;
  std::vector<Transition> out;
  if (ts.empty() || k == 0) return out;
  for (const auto& t : ts) {
    if (t.achieved.empty()) throw std::invalid_argument("her_relabel: episode carries no achieved goals");
  }
  out.reserve(ts.size() * static_cast<std::size_t>(k));
  for (std::size_t t = 0; t < ts.size(); ++t) {
    std::uniform_int_distribution<std::size_t> future(t, ts.size() - 1);
    for (int j = 0; j < k; ++j) {
      const auto& g = ts[future(rng)].achieved;
      Transition r = relabel(ts[t], g);
      r.goal = g;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace rf::replay
