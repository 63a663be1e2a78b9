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

#include "replayforge/qcore/state.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rf::qcore {
namespace {

constexpr Complex kI{0.0, 1.0};

void check_qubits(std::span<const int> qubits, int n_qubits) {
  if (qubits.empty() || qubits.size() > 2) {
    throw std::invalid_argument("local operators act on one or two qubits");
  }
  for (int q : qubits) {
    if (q < 0 || q >= n_qubits) throw std::invalid_argument("qubit index out of range");
  }
  if (qubits.size() == 2 && qubits[0] == qubits[1]) {
    throw std::invalid_argument("qubit indices must be distinct");
  }
}

// Applies  to the index space of dimension 2^n through get/set on a
// basis index. Works for vectors, and for rows or columns of a matrix.
template <typename Access>
void apply_local_indices(const CMatrix& local, std::span<const int> qubits, int n_qubits,
                         Access&& at) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (qubits.size() == 1) {
    const std::size_t m = std::size_t{1} << (n_qubits - 1 - qubits[0]);
    const Complex u00 = local(0, 0), u01 = local(0, 1), u10 = local(1, 0), u11 = local(1, 1);
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & m) continue;
      Complex& a0 = at(i);
      Complex& a1 = at(i | m);
      const Complex x0 = a0, x1 = a1;
      a0 = u00 * x0 + u01 * x1;
      a1 = u10 * x0 + u11 * x1;
    }
    return;
  }
  const std::size_t m0 = std::size_t{1} << (n_qubits - 1 - qubits[0]);
  const std::size_t m1 = std::size_t{1} << (n_qubits - 1 - qubits[1]);
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & m0) || (i & m1)) continue;
    const std::array<std::size_t, 4> idx{i, i | m1, i | m0, i | m0 | m1};
    std::array<Complex, 4> x{};
    for (int r = 0; r < 4; ++r) x[r] = at(idx[r]);
    for (int r = 0; r < 4; ++r) {
      Complex acc = 0.0;
      for (int c = 0; c < 4; ++c) acc += local(r, c) * x[c];
      at(idx[r]) = acc;
    }
  }
}

CMatrix pauli(int which) {
  CMatrix m(2, 2);
  switch (which) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -kI, kI, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli index must be in 0..3");
  }
  return m;
}

CMatrix pauli_string_matrix(std::span<const int> paulis) {
  CMatrix out = pauli(paulis[0]);
  for (std::size_t i = 1; i < paulis.size(); ++i) {
    const CMatrix p = pauli(paulis[i]);
    CMatrix k(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c) k.block(r * 2, c * 2, 2, 2) = out(r, c) * p;
    out = std::move(k);
  }
  return out;
}

}  // namespace

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 24) throw std::invalid_argument("statevector qubit count out of range");
  amps_ = CVector::Zero(Eigen::Index{1} << n_qubits);
  amps_(0) = 1.0;
}

Statevector::Statevector(int n_qubits, CVector amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (amps_.size() != (Eigen::Index{1} << n_qubits)) {
    throw std::invalid_argument("amplitude count does not match qubit count");
  }
  if (std::abs(norm_squared() - 1.0) > 1e-10) throw std::invalid_argument("statevector is not normalized");
}

void Statevector::apply(const GateSpec& gate) {
  gate.validate(n_qubits_);
  apply_local(local_matrix(gate), std::span<const int>(gate.qubits.data(), gate.arity()));
}

void Statevector::apply(const Circuit& circuit) {
  for (const auto& g : circuit) apply(g);
}

void Statevector::apply_local(const CMatrix& local, std::span<const int> qubits) {
  check_qubits(qubits, n_qubits_);
  apply_local_indices(local, qubits, n_qubits_,
                      [this](std::size_t i) -> Complex& { return amps_(static_cast<Eigen::Index>(i)); });
}

double Statevector::norm_squared() const { return amps_.squaredNorm(); }

DensityMatrix::DensityMatrix(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 12) throw std::invalid_argument("density matrix qubit count out of range");
  const auto d = Eigen::Index{1} << n_qubits;
  rho_ = CMatrix::Zero(d, d);
  rho_(0, 0) = 1.0;
}

DensityMatrix::DensityMatrix(const Statevector& pure) : n_qubits_(pure.n_qubits()) {
  const CVector& a = pure.amplitudes();
  rho_ = a * a.adjoint();
}

DensityMatrix::DensityMatrix(int n_qubits, CMatrix rho) : n_qubits_(n_qubits), rho_(std::move(rho)) {
  if (rho_.rows() != (Eigen::Index{1} << n_qubits) || rho_.cols() != rho_.rows()) {
    throw std::invalid_argument("density matrix shape does not match qubit count");
  }
  if (hermiticity_defect() > 1e-10) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(trace() - Complex(1.0)) > 1e-10) throw std::invalid_argument("density matrix trace is not 1");
}

void DensityMatrix::apply(const GateSpec& gate) {
  gate.validate(n_qubits_);
  apply_local(local_matrix(gate), std::span<const int>(gate.qubits.data(), gate.arity()));
}

void DensityMatrix::apply_local(const CMatrix& local, std::span<const int> qubits) {
  check_qubits(qubits, n_qubits_);
  const Eigen::Index d = rho_.rows();
  // U rho: act on the row index of every column.
  for (Eigen::Index c = 0; c < d; ++c) {
    apply_local_indices(local, qubits, n_qubits_, [&](std::size_t i) -> Complex& {
      return rho_(static_cast<Eigen::Index>(i), c);
    });
  }
  // (U rho) U^dagger: act with conj(U) on the column index of every row.
  const CMatrix conj_local = local.conjugate();
  for (Eigen::Index r = 0; r < d; ++r) {
    apply_local_indices(conj_local, qubits, n_qubits_, [&](std::size_t i) -> Complex& {
      return rho_(r, static_cast<Eigen::Index>(i));
    });
  }
}

void DensityMatrix::conjugate_pauli(std::span<const int> qubits, std::span<const int> paulis) {
  if (qubits.size() != paulis.size()) throw std::invalid_argument("one pauli per qubit required");
  apply_local(pauli_string_matrix(paulis), qubits);
}

void DensityMatrix::depolarize(std::span<const int> qubits, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing strength must lie in [0, 1]");
  check_qubits(qubits, n_qubits_);
  if (p == 0.0) return;
  const int k = static_cast<int>(qubits.size());
  const int n_paulis = 1 << (2 * k);
  CMatrix mixed = CMatrix::Zero(rho_.rows(), rho_.cols());
  std::array<int, 2> labels{};
  for (int code = 1; code < n_paulis; ++code) {
    labels[0] = k == 1 ? code : code / 4;
    labels[1] = code % 4;
    DensityMatrix copy = *this;
    copy.conjugate_pauli(qubits, std::span<const int>(labels.data(), static_cast<std::size_t>(k)));
    mixed += copy.rho_;
  }
  rho_ = (1.0 - p) * rho_ + (p / static_cast<double>(n_paulis - 1)) * mixed;
}

Complex DensityMatrix::trace() const { return rho_.trace(); }

double DensityMatrix::hermiticity_defect() const { return (rho_ - rho_.adjoint()).norm(); }

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

CMatrix DensityMatrix::reduced_single(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_) throw std::invalid_argument("qubit index out of range");
  const std::size_t m = std::size_t{1} << (n_qubits_ - 1 - qubit);
  CMatrix out = CMatrix::Zero(2, 2);
  const auto d = static_cast<std::size_t>(rho_.rows());
  for (std::size_t i = 0; i < d; ++i) {
    for (int b = 0; b < 2; ++b) {
      const std::size_t j = b ? (i | m) : (i & ~m);
      const int a = (i & m) ? 1 : 0;
      out(a, b) += rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

DensityMatrix apply_depolarizing(const DensityMatrix& rho, std::span<const int> qubits, double p) {
  DensityMatrix out = rho;
  out.depolarize(qubits, p);
  return out;
}

std::vector<CMatrix> depolarizing_kraus(int k, double p) {
  if (k < 1 || k > 2) throw std::invalid_argument("depolarizing channel acts on one or two qubits");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing strength must lie in [0, 1]");
  const int n_paulis = 1 << (2 * k);
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(n_paulis));
  std::array<int, 2> labels{};
  for (int code = 0; code < n_paulis; ++code) {
    labels[0] = k == 1 ? code : code / 4;
    labels[1] = code % 4;
    const double w = code == 0 ? 1.0 - p : p / static_cast<double>(n_paulis - 1);
    out.push_back(std::sqrt(w) *
                  pauli_string_matrix(std::span<const int>(labels.data(), static_cast<std::size_t>(k))));
  }
  return out;
}

Statevector simulate(const Circuit& circuit, int n_qubits) {
  Statevector psi(n_qubits);
  psi.apply(circuit);
  return psi;
}

DensityMatrix simulate_noisy(const Circuit& circuit, int n_qubits, const NoiseModel& noise) {
  DensityMatrix rho(n_qubits);
  for (const auto& g : circuit) {
    rho.apply(g);
    const double p = g.arity() == 1 ? noise.p1 : noise.p2;
    if (p > 0.0) rho.depolarize(std::span<const int>(g.qubits.data(), g.arity()), p);
  }
  return rho;
}

}  // namespace rf::qcore
