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

#include <cstddef>
#include <vector>

namespace rf::replay {

/// Complete binary tree of priority sums. Leaves are padded to a power of
/// two; updates recompute each ancestor from its two children.
class SumTree {
 public:
  explicit SumTree(std::size_t min_leaves);

  std::size_t capacity() const { return leaves_; }
  double total() const { return nodes_[0]; }
  double get(std::size_t leaf) const;
  void set(std::size_t leaf, double priority);

  /// Leaf whose cumulative interval contains `prefix` (clamped to [0, total)).
  /// Never returns a zero-priority leaf while total() > 0.
  std::size_t find(double prefix) const;

  /// Rebuild every internal node from the leaves.
  void rebuild();

  const std::vector<double>& nodes() const { return nodes_; }

 private:
  std::size_t leaves_;
  std::vector<double> nodes_;
};

}  // namespace rf::replay
