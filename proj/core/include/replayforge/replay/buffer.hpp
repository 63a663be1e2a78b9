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
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "replayforge/common.hpp"
#include "replayforge/replay/priority.hpp"
#include "replayforge/replay/sum_tree.hpp"

namespace rf::replay {

struct Transition {
  std::vector<float> state;
  std::uint32_t action = 0;
  float reward = 0.0f;
  std::vector<float> next_state;
  bool done = false;
  std::uint32_t episode_id = 0;
  std::uint32_t step = 0;  // 1-based position in the episode
  // Goal-conditioned data for HER; empty otherwise. Not persisted.
  std::vector<float> goal;
  std::vector<float> achieved;
};

struct Episode {
  std::vector<Transition> transitions;
  std::vector<double> td_plus;
};

struct BufferConfig {
  Strategy strategy = Strategy::Uniform;
  std::size_t capacity = 100000;
  std::uint32_t state_dim = 0;
  std::uint32_t action_count = 0;
  std::string env_id;
  PrioritySpec spec;
  OmegaSchedule schedule;
};

struct SampledBatch {
  std::vector<std::size_t> indices;
  std::vector<const Transition*> items;
  std::vector<double> is_weights;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(BufferConfig config);

  const BufferConfig& config() const { return cfg_; }
  Strategy strategy() const { return cfg_.strategy; }
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return cfg_.capacity; }
  bool empty() const { return size_ == 0; }

  /// Frame counter tau: number of counted inserts since construction/transfer.
  std::int64_t frames() const { return frames_; }
  void set_frames(std::int64_t tau) { frames_ = tau; }
  double omega_now() const;
  double beta_now() const { return beta_at(cfg_.spec, frames_); }

  /// Insert with max priority; evicts the oldest transition when full.
  /// Returns the slot written.
  std::size_t add(Transition t, bool count_frame = true);

  /// Transition at logical position i (0 = oldest).
  const Transition& at(std::size_t i) const;
  /// Slot holding logical position i.
  std::size_t slot_of(std::size_t i) const;
  const Transition& slot(std::size_t s) const;

  SampledBatch sample(std::size_t batch_size, Rng& rng);

  /// Replace stored |delta| at the given slots.
  void update_td(std::span<const std::size_t> slots, std::span<const double> td_plus);

  /// Recompute reliability for the episode and refresh its priorities.
  void on_episode_end(std::uint32_t episode_id);

  double td_plus(std::size_t slot) const { return td_plus_.at(slot); }
  double reliability(std::size_t slot) const { return reliability_.at(slot); }
  /// Current unnormalized priority of a slot (1 for non-prioritized strategies).
  double priority(std::size_t slot) const;
  double max_priority() const { return max_priority_; }
  const SumTree* tree() const { return tree_ ? &*tree_ : nullptr; }

  std::vector<std::size_t> episode_slots(std::uint32_t episode_id) const;
  std::uint32_t next_episode_id() const { return next_episode_id_; }

  /// Reset every priority to the current maximum.
  void reset_priorities();

  /// Binary format; see README. Transition sections are bit-exact.
  void serialize(std::ostream& out) const;
  static ReplayBuffer deserialize(std::istream& in);
  void save(const std::string& path) const;
  static ReplayBuffer load(const std::string& path);

  /// Throws ConfigError unless dims match.
  void require_compatible(std::uint32_t state_dim, std::uint32_t action_count) const;

 private:
  void refresh_slot(std::size_t s);
  void refresh_all();
  void recompute_episode(std::uint32_t episode_id);
  void maybe_rebuild_for_omega();

  BufferConfig cfg_;
  std::vector<Transition> data_;
  std::vector<double> td_plus_;
  std::vector<double> reliability_;
  std::optional<SumTree> tree_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
  std::int64_t frames_ = 0;
  double max_td_ = 1.0;
  double max_priority_ = 1.0;
  double omega_built_ = 0.0;
  std::map<std::uint32_t, std::deque<std::size_t>> episodes_;
  std::set<std::uint32_t> stale_;
  std::uint32_t next_episode_id_ = 0;
};

/// Bit-identical copy of `source` into a fresh buffer with the same
/// configuration; priorities reset to max and tau reset to 0 unless
/// `keep_priorities`.
ReplayBuffer transfer_buffer(const ReplayBuffer& source, bool keep_priorities = false);

/// Copy all transitions of `source`, oldest first, into `target`.
void transfer_into(const ReplayBuffer& source, ReplayBuffer& target, bool keep_priorities = false);

/// Serialized bytes of the transition records only (no header).
std::string transition_section(const ReplayBuffer& buffer);

/// Recomputes state, next_state, reward and done of a transition for a new goal.
using RelabelFn = std::function<Transition(const Transition&, std::span<const float> goal)>;

/// HER "future" strategy: for every transition draw k goals from the achieved
/// states of the same or later steps of the episode.
std::vector<Transition> her_relabel(const Episode& episode, int k, const RelabelFn& relabel, Rng& rng);

}  // namespace rf::replay
