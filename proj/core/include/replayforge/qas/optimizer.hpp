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
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rf::qas {

enum class OptimizerMethod { NelderMead, ParamShiftAdam };

OptimizerMethod parse_optimizer(const std::string& name);

struct VqeOptimizerConfig {
  OptimizerMethod method = OptimizerMethod::NelderMead;
  int max_iter = 1000;
  bool warm_start = true;
  double initial_step = 0.5;  // Nelder-Mead simplex edge
  double adam_lr = 0.05;
  double tolerance = 1e-10;  // stop when the simplex/gradient collapses below this

  void validate() const;
};

struct OptimizeResult {
  std::vector<double> thetas;
  double cost = 0.0;
  std::size_t cost_calls = 0;
  int iterations = 0;
};

using CostFunction = std::function<double(std::span<const double>)>;

/// Minimize `cost` from `theta0`. The returned cost never exceeds cost(theta0).
/// The parameter-shift gradient assumes every parameter enters as
/// exp(-i theta P / 2) for a Pauli string P. Throws NumericError on a
/// non-finite cost.
OptimizeResult minimize(const CostFunction& cost, std::vector<double> theta0, const VqeOptimizerConfig& config);

/// Parameter-shift gradient: (f(theta + pi/2 e_i) - f(theta - pi/2 e_i)) / 2.
std::vector<double> parameter_shift_gradient(const CostFunction& cost, std::span<const double> theta);

}  // namespace rf::qas
