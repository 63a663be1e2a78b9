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

#include "replayforge/qas/circuit_state.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "replayforge/common.hpp"

namespace rf::qas {

using qcore::GateKind;

Encoding parse_encoding(const std::string& name) {
  if (name == "I" || name == "1" || name == "i") return Encoding::I;
  if (name == "II" || name == "2" || name == "ii") return Encoding::II;
  throw ConfigError("unknown encoding: " + name);
}

CircuitTensorState::CircuitTensorState(int n_qubits, int max_layers, Encoding encoding)
    : n_(n_qubits), layers_(max_layers), enc_(encoding) {
  if (n_qubits < 1) throw ConfigError("n_qubits must be >= 1");
  if (max_layers < 1) throw ConfigError("max_layers must be >= 1");
  data_.assign(static_cast<std::size_t>(layers_) * static_cast<std::size_t>(rows()) * static_cast<std::size_t>(n_),
               0.0);
  mu_.assign(static_cast<std::size_t>(n_), 0);
}

void CircuitTensorState::clear() {
  std::fill(data_.begin(), data_.end(), 0.0);
  std::fill(mu_.begin(), mu_.end(), 0);
  placements_.clear();
}

std::size_t CircuitTensorState::index(int layer, int row, int qubit) const {
  if (layer < 0 || layer >= layers_ || row < 0 || row >= rows() || qubit < 0 || qubit >= n_) {
    throw std::out_of_range("tensor index out of range");
  }
  return (static_cast<std::size_t>(layer) * static_cast<std::size_t>(rows()) + static_cast<std::size_t>(row)) *
             static_cast<std::size_t>(n_) +
         static_cast<std::size_t>(qubit);
}

double CircuitTensorState::at(int layer, int row, int qubit) const { return data_[index(layer, row, qubit)]; }

double CircuitTensorState::label_for(GateKind kind) const {
  switch (kind) {
    case GateKind::CNOT:
      if (enc_ != Encoding::I) break;
      return 1.0;
    case GateKind::RXX:
      if (enc_ != Encoding::II) break;
      return 1.0;
    case GateKind::RYY:
      if (enc_ != Encoding::II) break;
      return 2.0;
    case GateKind::RZZ:
      if (enc_ != Encoding::II) break;
      return 3.0;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
      return 1.0;
    default:
      break;
  }
  throw std::invalid_argument("gate not representable in this encoding");
}

int CircuitTensorState::resolve_moment(int q0, int q1) const {
  if (q0 < 0 || q0 >= n_ || q1 >= n_ || q0 == q1) throw std::invalid_argument("bad qubit indices");
  int l = mu_[static_cast<std::size_t>(q0)];
  if (q1 >= 0) l = std::max(l, mu_[static_cast<std::size_t>(q1)]);
  return l;
}

void CircuitTensorState::place(GateKind kind, int q0, int q1) {
  const int arity = qcore::gate_arity(kind);
  if ((arity == 2) != (q1 >= 0)) throw std::invalid_argument("qubit count does not match gate arity");
  const double label = label_for(kind);
  const int l = resolve_moment(q0, q1);
  if (l >= layers_) throw std::length_error("placement exceeds the layer budget");
  if (arity == 2) {
    data_[index(l, q1, q0)] = label;
    mu_[static_cast<std::size_t>(q0)] = l + 1;
    mu_[static_cast<std::size_t>(q1)] = l + 1;
  } else {
    const int axis = kind == GateKind::RX ? 1 : kind == GateKind::RY ? 2 : 3;
    data_[index(l, n_ + axis - 1, q0)] = label;
    mu_[static_cast<std::size_t>(q0)] = l + 1;
  }
  placements_.push_back(Placement{kind, {q0, q1}, l});
}

namespace {
GateKind axis_kind(int axis) {
  switch (axis) {
    case 1: return GateKind::RX;
    case 2: return GateKind::RY;
    case 3: return GateKind::RZ;
  }
  throw std::invalid_argument("rotation axis must be 1, 2 or 3");
}

void check_range(int v, int n) {
  if (v < 0 || v > n) throw std::invalid_argument("action index out of range");
}
}  // namespace

void CircuitTensorState::encode_action_I(const std::array<int, 4>& a) {
  for (int i : {0, 1, 2}) check_range(a[static_cast<std::size_t>(i)], n_);
  CircuitTensorState trial = *this;
  if (a[0] != n_) {
    const int target = (a[0] + a[1]) % n_;
    trial.place(GateKind::CNOT, a[0], target);
  }
  if (a[2] != n_) trial.place(axis_kind(a[3]), a[2]);
  *this = std::move(trial);
}

void CircuitTensorState::encode_action_II(const std::array<int, 8>& a) {
  for (int i = 0; i < 7; ++i) check_range(a[static_cast<std::size_t>(i)], n_);
  CircuitTensorState trial = *this;
  const GateKind kinds[3] = {GateKind::RXX, GateKind::RYY, GateKind::RZZ};
  for (std::size_t g = 0; g < 3; ++g) {
    const int c = a[2 * g];
    if (c == n_) continue;
    trial.place(kinds[g], c, (c + a[2 * g + 1]) % n_);
  }
  if (a[6] != n_) trial.place(axis_kind(a[7]), a[6]);
  *this = std::move(trial);
}

std::vector<std::size_t> CircuitTensorState::moment_order() const {
  std::vector<std::size_t> idx(placements_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const Placement& x = placements_[a];
    const Placement& y = placements_[b];
    if (x.layer != y.layer) return x.layer < y.layer;
    return x.qubits[0] < y.qubits[0];
  });
  return idx;
}

std::vector<Placement> CircuitTensorState::ordered_placements() const {
  std::vector<Placement> out;
  for (std::size_t i : moment_order()) out.push_back(placements_[i]);
  return out;
}

std::size_t CircuitTensorState::parameter_count() const {
  return static_cast<std::size_t>(
      std::count_if(placements_.begin(), placements_.end(), [](const Placement& p) { return p.parameterized(); }));
}

qcore::Circuit CircuitTensorState::build_circuit(std::span<const double> thetas) const {
  if (thetas.size() != parameter_count()) throw std::invalid_argument("theta count does not match the circuit");
  std::vector<std::optional<double>> angle(placements_.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < placements_.size(); ++i)
    if (placements_[i].parameterized()) angle[i] = thetas[k++];
  qcore::Circuit out;
  out.reserve(placements_.size());
  for (std::size_t i : moment_order()) {
    const Placement& p = placements_[i];
    out.push_back(p.two_qubit() ? qcore::GateSpec::two(p.kind, p.qubits[0], p.qubits[1], angle[i])
                                : qcore::GateSpec::one(p.kind, p.qubits[0], angle[i]));
  }
  return out;
}

CircuitTensorState CircuitTensorState::from_circuit(const qcore::Circuit& circuit, int n_qubits, int max_layers,
                                                    Encoding encoding) {
  CircuitTensorState s(n_qubits, max_layers, encoding);
  for (const auto& g : circuit) s.place(g.kind, g.qubits[0], g.arity() == 2 ? g.qubits[1] : -1);
  return s;
}

std::vector<GateAction> action_table(int n_qubits, Encoding encoding) {
  std::vector<GateAction> out;
  std::vector<GateKind> two;
  if (encoding == Encoding::I) {
    two = {GateKind::CNOT};
  } else {
    two = {GateKind::RXX, GateKind::RYY, GateKind::RZZ};
  }
  for (GateKind k : two)
    for (int c = 0; c < n_qubits; ++c)
      for (int off = 1; off < n_qubits; ++off) out.push_back({k, c, (c + off) % n_qubits});
  for (int q = 0; q < n_qubits; ++q)
    for (GateKind k : {GateKind::RX, GateKind::RY, GateKind::RZ}) out.push_back({k, q, -1});
  return out;
}

namespace {
int offset_of(const GateAction& a, int n) { return ((a.q1 - a.q0) % n + n) % n; }
int axis_of(GateKind k) { return k == GateKind::RX ? 1 : k == GateKind::RY ? 2 : 3; }
}  // namespace

std::array<int, 4> to_tuple_I(const GateAction& a, int n) {
  if (a.q1 >= 0) return {a.q0, offset_of(a, n), n, 1};
  return {n, 0, a.q0, axis_of(a.kind)};
}

std::array<int, 8> to_tuple_II(const GateAction& a, int n) {
  std::array<int, 8> t{n, 0, n, 0, n, 0, n, 1};
  switch (a.kind) {
    case GateKind::RXX: t[0] = a.q0, t[1] = offset_of(a, n); break;
    case GateKind::RYY: t[2] = a.q0, t[3] = offset_of(a, n); break;
    case GateKind::RZZ: t[4] = a.q0, t[5] = offset_of(a, n); break;
    default: t[6] = a.q0, t[7] = axis_of(a.kind); break;
  }
  return t;
}

}  // namespace rf::qas
