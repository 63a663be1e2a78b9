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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "replayforge/qcore/gates.hpp"

namespace rf::qas {

enum class Encoding { I, II };

Encoding parse_encoding(const std::string& name);

/// A gate placed on the tensor. Two-qubit gates keep (control, target).
struct Placement {
  qcore::GateKind kind = qcore::GateKind::RZ;
  std::array<int, 2> qubits{0, -1};
  int layer = 0;
  bool parameterized() const { return qcore::gate_is_parameterized(kind); }
  bool two_qubit() const { return qubits[1] >= 0; }
};

/// Layered circuit tensor S[L_max][n+3][n] with per-qubit moment tracking.
///
/// Rows 0..n-1 form the connectivity plane (S[l][target][control]); rows
/// n..n+2 hold RX/RY/RZ placements per qubit. Encoding I writes 1 for CNOT;
/// encoding II writes 1/2/3 for RXX/RYY/RZZ.
class CircuitTensorState {
 public:
  CircuitTensorState(int n_qubits, int max_layers, Encoding encoding);

  int n_qubits() const { return n_; }
  int max_layers() const { return layers_; }
  int rows() const { return n_ + 3; }
  Encoding encoding() const { return enc_; }

  double at(int layer, int row, int qubit) const;
  const std::vector<double>& tensor() const { return data_; }
  const std::vector<int>& moments() const { return mu_; }
  const std::vector<Placement>& placements() const { return placements_; }

  /// [a0, a1, a2, a3]: CNOT control a0 (n = none), target (a0 + a1) mod n;
  /// rotation on a2 (n = none) about axis a3 in {1,2,3}.
  void encode_action_I(const std::array<int, 4>& a);
  /// [a0xx, a1xx, a0yy, a1yy, a0zz, a1zz, a_rot, a_axis].
  void encode_action_II(const std::array<int, 8>& a);

  /// Place one gate at the next causal moment. Throws std::length_error
  /// beyond max_layers and std::invalid_argument on gates the encoding
  /// cannot represent.
  void place(qcore::GateKind kind, int q0, int q1 = -1);
  /// Moment the gate would occupy.
  int resolve_moment(int q0, int q1 = -1) const;
  bool fits(int q0, int q1 = -1) const { return resolve_moment(q0, q1) < layers_; }

  /// Placement indices sorted by moment then first qubit.
  std::vector<std::size_t> moment_order() const;
  std::vector<Placement> ordered_placements() const;
  std::size_t parameter_count() const;

  /// Gates ordered by moment then qubit. `thetas` bind the parameterized
  /// gates in placement order, so angles stay attached to their gate as the
  /// circuit grows.
  qcore::Circuit build_circuit(std::span<const double> thetas) const;

  /// Re-encode a circuit gate by gate.
  static CircuitTensorState from_circuit(const qcore::Circuit& circuit, int n_qubits, int max_layers,
                                         Encoding encoding);

  void clear();

 private:
  std::size_t index(int layer, int row, int qubit) const;
  double label_for(qcore::GateKind kind) const;

  int n_;
  int layers_;
  Encoding enc_;
  std::vector<double> data_;
  std::vector<int> mu_;
  std::vector<Placement> placements_;
};

/// One discrete action = one gate placement, expressed as the encoding's
/// action tuple. Encoding I: n(n-1) CNOTs then 3n rotations. Encoding II:
/// n(n-1) each of RXX, RYY, RZZ then 3n rotations.
struct GateAction {
  qcore::GateKind kind;
  int q0;
  int q1;  // -1 for rotations
};

std::vector<GateAction> action_table(int n_qubits, Encoding encoding);

std::array<int, 4> to_tuple_I(const GateAction& a, int n_qubits);
std::array<int, 8> to_tuple_II(const GateAction& a, int n_qubits);

}  // namespace rf::qas
