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

#include "replayforge/agent/network.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace rf::agent {
namespace {

constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
constexpr char kMagic[4] = {'R', 'F', 'Q', 'N'};
constexpr std::uint32_t kVersion = 1;

void activate(Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::ReLU) {
    z = z.cwiseMax(0.0);
  } else {
    z = z.unaryExpr([](double x) { return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * (std::exp(x) - 1.0); });
  }
}

Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::ReLU) return z.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
  return z.unaryExpr([](double x) { return x > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x); });
}

void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("network checkpoint is truncated");
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void write_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

double read_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("network checkpoint is truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string_view activation_name(Activation a) { return a == Activation::ReLU ? "relu" : "selu"; }

Activation parse_activation(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "relu") return Activation::ReLU;
  if (lower == "selu") return Activation::SELU;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

QNetwork::QNetwork(std::vector<int> layer_sizes, Activation activation)
    : sizes_(std::move(layer_sizes)), act_(activation) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs at least input and output sizes");
  Eigen::Index off = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw std::invalid_argument("layer sizes must be positive");
    w_off_.push_back(off);
    off += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1];
    b_off_.push_back(off);
    off += sizes_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(off);
}

QNetwork::QNetwork(std::vector<int> layer_sizes, Activation activation, Rng& rng)
    : QNetwork(std::move(layer_sizes), activation) {
  initialize(rng);
}

Eigen::Map<const Eigen::MatrixXd> QNetwork::weight(std::size_t l) const {
  return {params_.data() + w_off_.at(l), sizes_[l + 1], sizes_[l]};
}
Eigen::Map<const Eigen::VectorXd> QNetwork::bias(std::size_t l) const {
  return {params_.data() + b_off_.at(l), sizes_[l + 1]};
}
Eigen::Map<Eigen::MatrixXd> QNetwork::weight(std::size_t l) {
  return {params_.data() + w_off_.at(l), sizes_[l + 1], sizes_[l]};
}
Eigen::Map<Eigen::VectorXd> QNetwork::bias(std::size_t l) { return {params_.data() + b_off_.at(l), sizes_[l + 1]}; }

void QNetwork::initialize(Rng& rng) {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const double fan_in = sizes_[l];
    std::uniform_real_distribution<double> wd(-std::sqrt(6.0 / fan_in), std::sqrt(6.0 / fan_in));
    std::uniform_real_distribution<double> bd(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
    auto w = weight(l);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = wd(rng);
    auto b = bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = bd(rng);
  }
}

Eigen::VectorXd QNetwork::forward(std::span<const double> state) const {
  if (static_cast<int>(state.size()) != input_size()) throw std::invalid_argument("state dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> x(state.data(), static_cast<Eigen::Index>(state.size()));
  return forward_batch(x);
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& state) const {
  return forward(std::span<const double>(state.data(), static_cast<std::size_t>(state.size())));
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& states) const {
  if (states.rows() != input_size()) throw std::invalid_argument("state dimension mismatch");
  Eigen::MatrixXd a = states;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = weight(l) * a;
    z.colwise() += bias(l);
    if (l + 1 < layer_count()) activate(z, act_);
    a = std::move(z);
  }
  return a;
}

double QNetwork::loss_and_gradient(const Eigen::MatrixXd& states, std::span<const int> actions,
                                   std::span<const double> targets, std::span<const double> weights,
                                   LossKind loss, Eigen::VectorXd& grad) const {
  const Eigen::Index batch = states.cols();
  if (states.rows() != input_size()) throw std::invalid_argument("state dimension mismatch");
  if (actions.size() != static_cast<std::size_t>(batch) || targets.size() != actions.size() ||
      (!weights.empty() && weights.size() != actions.size())) {
    throw std::invalid_argument("batch arrays are not aligned");
  }
  const std::size_t layers = layer_count();
  std::vector<Eigen::MatrixXd> acts(layers + 1);
  std::vector<Eigen::MatrixXd> pre(layers);
  acts[0] = states;
  for (std::size_t l = 0; l < layers; ++l) {
    pre[l] = weight(l) * acts[l];
    pre[l].colwise() += bias(l);
    acts[l + 1] = pre[l];
    if (l + 1 < layers) activate(acts[l + 1], act_);
  }
  const Eigen::MatrixXd& q = acts[layers];
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double total = 0.0;
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    if (a < 0 || a >= output_size()) throw std::invalid_argument("action index out of range");
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    const double err = q(a, i) - targets[static_cast<std::size_t>(i)];
    double l, dl;
    if (loss == LossKind::Huber && std::abs(err) > 1.0) {
      l = std::abs(err) - 0.5;
      dl = err > 0 ? 1.0 : -1.0;
    } else {
      l = 0.5 * err * err;
      dl = err;
    }
    total += w * l;
    delta(a, i) = w * dl * inv_b;
  }
  grad.setZero(params_.size());
  for (std::size_t l = layers; l-- > 0;) {
    Eigen::Map<Eigen::MatrixXd>(grad.data() + w_off_[l], sizes_[l + 1], sizes_[l]) = delta * acts[l].transpose();
    Eigen::Map<Eigen::VectorXd>(grad.data() + b_off_[l], sizes_[l + 1]) = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = weight(l).transpose() * delta;
      delta = back.cwiseProduct(activation_derivative(pre[l - 1], act_));
    }
  }
  return total * inv_b;
}

double QNetwork::loss(const Eigen::MatrixXd& states, std::span<const int> actions, std::span<const double> targets,
                      std::span<const double> weights, LossKind kind) const {
  const Eigen::MatrixXd q = forward_batch(states);
  double total = 0.0;
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    const double err = q(actions[static_cast<std::size_t>(i)], i) - targets[static_cast<std::size_t>(i)];
    total += w * ((kind == LossKind::Huber && std::abs(err) > 1.0) ? std::abs(err) - 0.5 : 0.5 * err * err);
  }
  return total / static_cast<double>(q.cols());
}

void QNetwork::copy_parameters_from(const QNetwork& other) {
  if (other.sizes_ != sizes_) throw std::invalid_argument("network shapes differ");
  params_ = other.params_;
}

void QNetwork::save(std::ostream& out) const {
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(sizes_.size()));
  for (int s : sizes_) write_u32(out, static_cast<std::uint32_t>(s));
  write_u32(out, static_cast<std::uint32_t>(act_));
  for (Eigen::Index i = 0; i < params_.size(); ++i) write_f64(out, params_(i));
  if (!out) throw IoError("failed writing network checkpoint");
}

QNetwork QNetwork::load(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw IoError("network checkpoint is truncated");
  if (!std::equal(magic, magic + 4, kMagic)) throw IoError("not a network checkpoint (bad magic)");
  if (read_u32(in) != kVersion) throw IoError("unsupported network checkpoint version");
  const std::uint32_t n = read_u32(in);
  if (n < 2 || n > 64) throw IoError("corrupt network checkpoint header");
  std::vector<int> sizes(n);
  for (auto& s : sizes) {
    const std::uint32_t v = read_u32(in);
    if (v == 0 || v > (1u << 20)) throw IoError("corrupt layer size in checkpoint");
    s = static_cast<int>(v);
  }
  const std::uint32_t act = read_u32(in);
  if (act > 1) throw IoError("unknown activation in checkpoint");
  QNetwork net(std::move(sizes), static_cast<Activation>(act));
  for (Eigen::Index i = 0; i < net.params_.size(); ++i) net.params_(i) = read_f64(in);
  return net;
}

void QNetwork::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  save(out);
}

QNetwork QNetwork::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open network checkpoint " + path);
  return load(in);
}

Adam::Adam(std::size_t n_params, AdamConfig config)
    : cfg_(config),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params))) {
  if (!(cfg_.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw std::invalid_argument("Adam size mismatch");
  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  params.array() -= cfg_.lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.eps);
}

double clip_global_norm(Eigen::VectorXd& grad, double max_norm) {
  const double norm = grad.norm();
  if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / norm;
  return norm;
}

double backward_and_step(QNetwork& net, const Eigen::MatrixXd& states, std::span<const int> actions,
                         std::span<const double> targets, std::span<const double> weights, LossKind loss,
                         double grad_clip, Adam& optimizer) {
  Eigen::VectorXd grad;
  const double l = net.loss_and_gradient(states, actions, targets, weights, loss, grad);
  if (!std::isfinite(l) || !grad.allFinite()) throw NumericError("non-finite loss or gradient in learner step");
  clip_global_norm(grad, grad_clip);
  optimizer.step(net.parameters(), grad);
  return l;
}

}  // namespace rf::agent
