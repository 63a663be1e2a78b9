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

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace rf::qcore {

using Complex = std::complex<double>;

// Dense operators are row-major; qubit 0 is the most significant bit of a
// basis index.
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

/// Frobenius norm of M^dagger M - I.
double unitarity_defect(const CMatrix& m);

/// Returns log2(dim) or throws std::invalid_argument if dim is not a power of two.
int qubits_for_dim(std::size_t dim);

/// A square unitary operator on n qubits.
///
/// The checked constructor rejects non-unitary input (defect above 1e-8);
/// products of UnitaryMatrix values skip the check since the product of two
/// unitaries is unitary up to rounding.
class UnitaryMatrix {
 public:
  UnitaryMatrix();  // 1-qubit identity

  explicit UnitaryMatrix(CMatrix m, double tolerance = 1e-8);

  static UnitaryMatrix identity(int n_qubits);

  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  int n_qubits() const { return n_qubits_; }

  UnitaryMatrix adjoint() const;
  UnitaryMatrix operator*(const UnitaryMatrix& rhs) const;

  Complex operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  /// Real parts row-major followed by imaginary parts row-major.
  std::vector<double> flatten_re_im() const;
  static UnitaryMatrix from_re_im(const std::vector<double>& flat);

 private:
  struct Unchecked {};
  UnitaryMatrix(CMatrix m, Unchecked);

  CMatrix m_;
  int n_qubits_ = 1;
};

enum class FidelityKind {
  TraceAbs,      // |Tr(a^dagger b)| / d
  TraceSquared,  // (|Tr(a^dagger b)| / d)^2
};

/// Global-phase-invariant overlap of two unitaries in [0, 1].
double fidelity(const UnitaryMatrix& a, const UnitaryMatrix& b,
                FidelityKind kind = FidelityKind::TraceAbs);

/// 1 - fidelity.
inline double unitary_distance(const UnitaryMatrix& a, const UnitaryMatrix& b,
                               FidelityKind kind = FidelityKind::TraceAbs) {
  return 1.0 - fidelity(a, b, kind);
}

}  // namespace rf::qcore
