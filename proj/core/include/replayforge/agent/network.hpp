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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "replayforge/common.hpp"

namespace rf::agent {

enum class Activation : std::uint8_t { ReLU = 0, SELU = 1 };
enum class LossKind { Huber, Squared };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

/// Fully connected network: affine layers with the activation between them
/// and a linear output layer. Parameters live in one flat vector, layer by
/// layer, each layer as column-major W (out x in) followed by b (out).
class QNetwork {
 public:
  QNetwork(std::vector<int> layer_sizes, Activation activation);
  QNetwork(std::vector<int> layer_sizes, Activation activation, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  Activation activation() const { return act_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::size_t layer_count() const { return sizes_.size() - 1; }
  std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
  Eigen::Map<Eigen::MatrixXd> weight(std::size_t layer);
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);

  /// He-style uniform init: W ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  void initialize(Rng& rng);

  Eigen::VectorXd forward(std::span<const double> state) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& state) const;
  /// Columns are samples: (in x B) -> (out x B).
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& states) const;

  /// Loss of the chosen-action values against targets:
  /// (1/B) sum_i w_i l(Q(s_i, a_i) - y_i), with l Huber(delta=1) or 0.5 x^2.
  /// Writes dL/dparams into `grad` (resized) and returns the loss.
  double loss_and_gradient(const Eigen::MatrixXd& states, std::span<const int> actions,
                           std::span<const double> targets, std::span<const double> weights,
                           LossKind loss, Eigen::VectorXd& grad) const;
  double loss(const Eigen::MatrixXd& states, std::span<const int> actions, std::span<const double> targets,
              std::span<const double> weights, LossKind loss) const;

  void copy_parameters_from(const QNetwork& other);

  void save(std::ostream& out) const;
  static QNetwork load(std::istream& in);
  void save_file(const std::string& path) const;
  static QNetwork load_file(const std::string& path);

 private:
  std::vector<int> sizes_;
  Activation act_;
  Eigen::VectorXd params_;
  std::vector<Eigen::Index> w_off_;
  std::vector<Eigen::Index> b_off_;
};

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t n_params, AdamConfig config);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  std::int64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  std::int64_t t_ = 0;
};

/// Scales `grad` so its Euclidean norm is at most max_norm; returns the norm
/// before clipping. max_norm <= 0 disables clipping.
double clip_global_norm(Eigen::VectorXd& grad, double max_norm);

/// One learner update: loss, gradient, clip, Adam. Throws NumericError on a
/// non-finite loss or gradient.
double backward_and_step(QNetwork& net, const Eigen::MatrixXd& states, std::span<const int> actions,
                         std::span<const double> targets, std::span<const double> weights, LossKind loss,
                         double grad_clip, Adam& optimizer);

}  // namespace rf::agent
