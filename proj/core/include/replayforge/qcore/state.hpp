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

#include <span>
#include <vector>

#include "replayforge/common.hpp"
#include "replayforge/qcore/gates.hpp"
#include "replayforge/qcore/linalg.hpp"

namespace rf::qcore {

class Statevector {
 public:
  /// |0...0> on n qubits.
  explicit Statevector(int n_qubits);
  /// Normalization is checked within 1e-10.
  Statevector(int n_qubits, CVector amplitudes);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }

  void apply(const GateSpec& gate);
  void apply(const Circuit& circuit);
  /// Apply a 2x2 matrix on `q` or a 4x4 matrix on (q0, q1).
  void apply_local(const CMatrix& local, std::span<const int> qubits);

  double norm_squared() const;

 private:
  int n_qubits_;
  CVector amps_;
};

class DensityMatrix {
 public:
  /// |0...0><0...0| on n qubits.
  explicit DensityMatrix(int n_qubits);
  explicit DensityMatrix(const Statevector& pure);
  /// Checks Hermiticity and unit trace within 1e-10.
  DensityMatrix(int n_qubits, CMatrix rho);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }

  void apply(const GateSpec& gate);
  void apply_local(const CMatrix& local, std::span<const int> qubits);

  /// In-place k-qubit depolarizing channel (k = qubits.size() in {1, 2}):
  /// rho -> (1-p) rho + p/(4^k - 1) sum_{P != I} P rho P.
  void depolarize(std::span<const int> qubits, double p);

  /// Conjugate by a Pauli string given per listed qubit (0=I,1=X,2=Y,3=Z).
  void conjugate_pauli(std::span<const int> qubits, std::span<const int> paulis);

  Complex trace() const;
  double hermiticity_defect() const;
  double min_eigenvalue() const;

  /// Reduced density matrix on one qubit (2x2).
  CMatrix reduced_single(int qubit) const;

 private:
  int n_qubits_;
  CMatrix rho_;
};

/// Functional form of DensityMatrix::depolarize; throws on p outside [0,1].
DensityMatrix apply_depolarizing(const DensityMatrix& rho, std::span<const int> qubits, double p);

/// Kraus operators of the k-qubit depolarizing channel (2^k x 2^k each).
std::vector<CMatrix> depolarizing_kraus(int k, double p);

/// Per-gate depolarizing noise: p1 after one-qubit gates, p2 after two-qubit
/// gates, on the qubits the gate touches.
struct NoiseModel {
  double p1 = 0.0;
  double p2 = 0.0;

  bool is_noiseless() const { return p1 == 0.0 && p2 == 0.0; }
};

Statevector simulate(const Circuit& circuit, int n_qubits);
DensityMatrix simulate_noisy(const Circuit& circuit, int n_qubits, const NoiseModel& noise);

}  // namespace rf::qcore
