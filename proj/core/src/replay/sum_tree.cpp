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

#include "replayforge/replay/sum_tree.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace rf::replay {

SumTree::SumTree(std::size_t min_leaves)
    : leaves_(std::bit_ceil(min_leaves < 1 ? std::size_t{1} : min_leaves)), nodes_(2 * leaves_ - 1, 0.0) {}

double SumTree::get(std::size_t leaf) const {
  if (leaf >= leaves_) throw std::out_of_range("sum tree leaf out of range");
  return nodes_[leaves_ - 1 + leaf];
}

void SumTree::set(std::size_t leaf, double priority) {
  if (leaf >= leaves_) throw std::out_of_range("sum tree leaf out of range");
  if (!(priority >= 0.0) || !std::isfinite(priority)) throw std::invalid_argument("priority must be finite and >= 0");
  std::size_t i = leaves_ - 1 + leaf;
  nodes_[i] = priority;
  while (i > 0) {
    i = (i - 1) / 2;
    nodes_[i] = nodes_[2 * i + 1] + nodes_[2 * i + 2];
  }
}

std::size_t SumTree::find(double prefix) const {
  if (!(total() > 0.0)) throw std::logic_error("sampling from an empty sum tree");
  double u = prefix < 0.0 ? 0.0 : prefix;
  std::size_t i = 0;
  while (i < leaves_ - 1) {
    const std::size_t l = 2 * i + 1;
    const std::size_t r = l + 1;
    if (nodes_[r] <= 0.0 || (u < nodes_[l] && nodes_[l] > 0.0)) {
      i = l;
    } else {
      u -= nodes_[l];
      i = r;
    }
  }
  return i - (leaves_ - 1);
}

void SumTree::rebuild() {
  for (std::size_t i = leaves_ - 1; i-- > 0;) nodes_[i] = nodes_[2 * i + 1] + nodes_[2 * i + 2];
}

}  // namespace rf::replay
