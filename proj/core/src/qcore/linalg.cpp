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

#include "replayforge/qcore/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rf::qcore {

double unitarity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  const CMatrix gram = m.adjoint() * m;
  return (gram - CMatrix::Identity(m.rows(), m.cols())).norm();
}

int qubits_for_dim(std::size_t dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two >= 2");
  }
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

UnitaryMatrix::UnitaryMatrix() : m_(CMatrix::Identity(2, 2)), n_qubits_(1) {}

UnitaryMatrix::UnitaryMatrix(CMatrix m, double tolerance) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("unitary must be square");
  n_qubits_ = qubits_for_dim(static_cast<std::size_t>(m_.rows()));
  if (!m_.allFinite()) throw std::invalid_argument("unitary has non-finite entries");
  const double defect = unitarity_defect(m_);
  if (defect > tolerance) {
    throw std::invalid_argument("matrix is not unitary (defect " + std::to_string(defect) + ")");
  }
}

UnitaryMatrix::UnitaryMatrix(CMatrix m, Unchecked)
    : m_(std::move(m)), n_qubits_(qubits_for_dim(static_cast<std::size_t>(m_.rows()))) {}

UnitaryMatrix UnitaryMatrix::identity(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("identity needs at least one qubit");
  const auto d = Eigen::Index{1} << n_qubits;
  return UnitaryMatrix(CMatrix::Identity(d, d), Unchecked{});
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(m_.adjoint(), Unchecked{}); }

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& rhs) const {
  if (dim() != rhs.dim()) throw std::invalid_argument("unitary product dimension mismatch");
  return UnitaryMatrix(CMatrix(m_ * rhs.m_), Unchecked{});
}

std::vector<double> UnitaryMatrix::flatten_re_im() const {
  const auto n = static_cast<std::size_t>(m_.size());
  std::vector<double> out(2 * n);
  const Complex* data = m_.data();  // row-major
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = data[i].real();
    out[n + i] = data[i].imag();
  }
  return out;
}

UnitaryMatrix UnitaryMatrix::from_re_im(const std::vector<double>& flat) {
  const std::size_t n = flat.size() / 2;
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (flat.size() % 2 != 0 || static_cast<std::size_t>(d * d) != n) {
    throw std::invalid_argument("flattened unitary has wrong length");
  }
  CMatrix m(d, d);
  Complex* data = m.data();
  for (std::size_t i = 0; i < n; ++i) data[i] = Complex(flat[i], flat[n + i]);
  return UnitaryMatrix(std::move(m), 1e-5);
}

double fidelity(const UnitaryMatrix& a, const UnitaryMatrix& b, FidelityKind kind) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  // Tr(a^dagger b) = sum_ij conj(a_ij) b_ij
  const Complex tr = (a.matrix().conjugate().cwiseProduct(b.matrix())).sum();
  double f = std::abs(tr) / static_cast<double>(a.dim());
  f = std::min(f, 1.0);
  return kind == FidelityKind::TraceSquared ? f * f : f;
}

}  // namespace rf::qcore
