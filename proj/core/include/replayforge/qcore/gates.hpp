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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "replayforge/qcore/linalg.hpp"

namespace rf::qcore {

enum class GateKind { RX, RY, RZ, CNOT, RXX, RYY, RZZ, XX, YY, V1, V2, V3 };

std::string_view gate_name(GateKind kind);
int gate_arity(GateKind kind);
bool gate_is_parameterized(GateKind kind);

/// One gate placement. For CNOT qubits[0] is the control.
struct GateSpec {
  GateKind kind = GateKind::RZ;
  std::array<int, 2> qubits{0, -1};
  std::optional<double> angle;

  static GateSpec one(GateKind kind, int q, std::optional<double> angle = std::nullopt);
  static GateSpec two(GateKind kind, int q0, int q1, std::optional<double> angle = std::nullopt);

  int arity() const { return gate_arity(kind); }

  /// Throws std::invalid_argument on bad qubit indices or angle presence.
  void validate(int n_qubits) const;

  std::string to_string() const;

  friend bool operator==(const GateSpec&, const GateSpec&) = default;
};

using Circuit = std::vector<GateSpec>;

/// The 2x2 or 4x4 matrix of the gate in its own qubit order (first listed
/// qubit is the most significant local bit).
CMatrix local_matrix(const GateSpec& spec);

/// Full 2^n x 2^n embedding of the gate, identity on the other qubits.
UnitaryMatrix gate_matrix(const GateSpec& spec, int n_qubits);

/// Product of gate matrices in circuit order: U = G_k ... G_2 G_1.
UnitaryMatrix circuit_unitary(const Circuit& circuit, int n_qubits);

}  // namespace rf::qcore
