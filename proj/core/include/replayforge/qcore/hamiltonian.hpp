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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "replayforge/common.hpp"
#include "replayforge/qcore/linalg.hpp"
#include "replayforge/qcore/state.hpp"

namespace rf::qcore {

struct PauliTerm {
  double coefficient = 0.0;
  std::string paulis;  // one of I/X/Y/Z per qubit, qubit 0 first

  friend bool operator==(const PauliTerm&, const PauliTerm&) = default;
};

class PauliSumHamiltonian {
 public:
  PauliSumHamiltonian() = default;
  PauliSumHamiltonian(int n_qubits, std::vector<PauliTerm> terms);

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  /// Same terms with every coefficient multiplied by `factor`.
  PauliSumHamiltonian scaled(double factor) const;

  CMatrix dense() const;

  /// -sum |c_k|: a guaranteed lower bound on the spectrum.
  double coefficient_lower_bound() const;

  /// Text format: `qubits: <n>` header, then `<coefficient> <pauli-string>`
  /// per line; `#` starts a comment, blank lines are ignored.
  static PauliSumHamiltonian parse(std::istream& in);
  static PauliSumHamiltonian load(const std::filesystem::path& path);
  std::string to_text() const;

 private:
  int n_qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

/// Open-boundary isotropic Heisenberg chain with a uniform Z field:
/// sum_i (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) + sum_i Z_i.
PauliSumHamiltonian heisenberg_hamiltonian(int n);

double expectation(const PauliSumHamiltonian& h, const Statevector& state);
double expectation(const PauliSumHamiltonian& h, const DensityMatrix& rho);

struct GroundState {
  double energy = 0.0;
  CVector vector;
};

/// Dense diagonalization; throws std::invalid_argument above 12 qubits.
GroundState ground_state(const PauliSumHamiltonian& h);
double exact_ground_energy(const PauliSumHamiltonian& h);

/// Monte-Carlo Pauli-trajectory estimate of <H> under per-gate depolarizing
/// noise. Used for registers too large for exact density-matrix evolution.
double trajectory_expectation(const Circuit& circuit, int n_qubits, const NoiseModel& noise,
                              const PauliSumHamiltonian& h, int trajectories, Rng& rng);

}  // namespace rf::qcore
