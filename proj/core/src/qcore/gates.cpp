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

#include "replayforge/qcore/gates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rf::qcore {
namespace {

constexpr Complex kI{0.0, 1.0};

CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

CMatrix pauli_x() { return mat2(0, 1, 1, 0); }
CMatrix pauli_y() { return mat2(0, -kI, kI, 0); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// exp(-i theta/2 P) for an involutory P
CMatrix pauli_rotation(const CMatrix& p, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  return c * CMatrix::Identity(p.rows(), p.cols()) - kI * s * p;
}

}  // namespace

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::RXX: return "RXX";
    case GateKind::RYY: return "RYY";
    case GateKind::RZZ: return "RZZ";
    case GateKind::XX: return "XX";
    case GateKind::YY: return "YY";
    case GateKind::V1: return "V1";
    case GateKind::V2: return "V2";
    case GateKind::V3: return "V3";
  }
  return "?";
}

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::CNOT:
    case GateKind::RXX:
    case GateKind::RYY:
    case GateKind::RZZ:
    case GateKind::XX:
    case GateKind::YY:
      return 2;
    default:
      return 1;
  }
}

bool gate_is_parameterized(GateKind kind) {
  switch (kind) {
    case GateKind::CNOT:
    case GateKind::V1:
    case GateKind::V2:
    case GateKind::V3:
      return false;
    default:
      return true;
  }
}

GateSpec GateSpec::one(GateKind kind, int q, std::optional<double> angle) {
  return GateSpec{kind, {q, -1}, angle};
}

GateSpec GateSpec::two(GateKind kind, int q0, int q1, std::optional<double> angle) {
  return GateSpec{kind, {q0, q1}, angle};
}

void GateSpec::validate(int n_qubits) const {
  const int k = arity();
  for (int i = 0; i < k; ++i) {
    if (qubits[i] < 0 || qubits[i] >= n_qubits) {
      throw std::invalid_argument("gate " + to_string() + ": qubit index out of range for " +
                                  std::to_string(n_qubits) + " qubits");
    }
  }
  if (k == 2 && qubits[0] == qubits[1]) {
    throw std::invalid_argument("gate " + to_string() + ": qubit indices must be distinct");
  }
  if (gate_is_parameterized(kind) && !angle) {
    throw std::invalid_argument("gate " + std::string(gate_name(kind)) + " requires an angle");
  }
  if (!gate_is_parameterized(kind) && angle) {
    throw std::invalid_argument("gate " + std::string(gate_name(kind)) + " takes no angle");
  }
  if (angle && !std::isfinite(*angle)) throw std::invalid_argument("gate angle is not finite");
}

std::string GateSpec::to_string() const {
  std::ostringstream os;
  os << gate_name(kind);
  if (angle) os << "(" << *angle << ")";
  os << " q" << qubits[0];
  if (arity() == 2) os << ",q" << qubits[1];
  return os.str();
}

CMatrix local_matrix(const GateSpec& spec) {
  const double theta = spec.angle.value_or(0.0);
  const double inv_sqrt5 = 1.0 / std::sqrt(5.0);
  switch (spec.kind) {
    case GateKind::RX: return pauli_rotation(pauli_x(), theta);
    case GateKind::RY: return mat2(std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2),
                                   std::cos(theta / 2));
    case GateKind::RZ: return mat2(std::exp(-kI * (theta / 2)), 0, 0, std::exp(kI * (theta / 2)));
    case GateKind::CNOT: {
      CMatrix m = CMatrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
      return m;
    }
    case GateKind::RXX:
    case GateKind::XX:
      return pauli_rotation(kron(pauli_x(), pauli_x()), theta);
    case GateKind::RYY:
    case GateKind::YY:
      return pauli_rotation(kron(pauli_y(), pauli_y()), theta);
    case GateKind::RZZ: {
      CMatrix m = CMatrix::Zero(4, 4);
      const Complex minus = std::exp(-kI * (theta / 2));
      const Complex plus = std::exp(kI * (theta / 2));
      m(0, 0) = minus;
      m(1, 1) = plus;
      m(2, 2) = plus;
      m(3, 3) = minus;
      return m;
    }
    case GateKind::V1: return inv_sqrt5 * mat2(1, 2.0 * kI, 2.0 * kI, 1);
    case GateKind::V2: return inv_sqrt5 * mat2(1, 2, -2, 1);
    case GateKind::V3: return inv_sqrt5 * mat2(Complex(1, 2), 0, 0, Complex(1, -2));
  }
  throw std::logic_error("unhandled gate kind");
}

UnitaryMatrix gate_matrix(const GateSpec& spec, int n_qubits) {
  spec.validate(n_qubits);
  const CMatrix local = local_matrix(spec);
  const int k = spec.arity();
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::array<int, 2> shift{};
  for (int i = 0; i < k; ++i) shift[i] = n_qubits - 1 - spec.qubits[i];

  // Local index of a basis state: first listed qubit is the high bit.
  auto local_index = [&](std::size_t basis) {
    std::size_t idx = 0;
    for (int i = 0; i < k; ++i) idx = (idx << 1) | ((basis >> shift[i]) & 1U);
    return idx;
  };
  std::size_t mask = 0;
  for (int i = 0; i < k; ++i) mask |= std::size_t{1} << shift[i];

  CMatrix full = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    const std::size_t lc = local_index(col);
    const std::size_t rest = col & ~mask;
    for (std::size_t lr = 0; lr < (std::size_t{1} << k); ++lr) {
      std::size_t row = rest;
      for (int i = 0; i < k; ++i) {
        if ((lr >> (k - 1 - i)) & 1U) row |= std::size_t{1} << shift[i];
      }
      full(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          local(static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc));
    }
  }
  return UnitaryMatrix(std::move(full), 1e-9);
}

UnitaryMatrix circuit_unitary(const Circuit& circuit, int n_qubits) {
  UnitaryMatrix u = UnitaryMatrix::identity(n_qubits);
  for (const auto& g : circuit) u = gate_matrix(g, n_qubits) * u;
  return u;
}

}  // namespace rf::qcore
