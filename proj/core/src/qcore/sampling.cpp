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

#include "replayforge/qcore/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rf::qcore {

UnitaryMatrix haar_random(int n_qubits, Rng& rng) {
  const auto d = Eigen::Index{1} << n_qubits;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd z(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) z(r, c) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    const Complex phase = mag > 0.0 ? rii / mag : Complex(1.0);
    q.col(i) *= phase;
  }
  return UnitaryMatrix(CMatrix(q), 1e-9);
}

UnitaryMatrix haar_random_1q(Rng& rng) { return haar_random(1, rng); }

UnitaryMatrix compose_random_circuit(const std::vector<GateSpec>& basis, int n_qubits,
                                     std::size_t length,
                                     const std::function<std::size_t(std::size_t)>& pick) {
  if (basis.empty()) throw std::invalid_argument("empty gate basis");
  std::vector<UnitaryMatrix> mats;
  mats.reserve(basis.size());
  for (const auto& g : basis) mats.push_back(gate_matrix(g, n_qubits));
  UnitaryMatrix u = UnitaryMatrix::identity(n_qubits);
  for (std::size_t k = 0; k < length; ++k) {
    const std::size_t idx = pick(k);
    if (idx >= mats.size()) throw std::out_of_range("gate pick outside basis");
    u = mats[idx] * u;
  }
  return u;
}

UnitaryMatrix random_circuit_target(const std::vector<GateSpec>& basis, int n_qubits,
                                    std::size_t min_len, std::size_t max_len, Rng& rng,
                                    std::size_t* length_out) {
  if (min_len > max_len) throw std::invalid_argument("min_len exceeds max_len");
  std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
  std::uniform_int_distribution<std::size_t> gate_dist(0, basis.size() - 1);
  const std::size_t n = len_dist(rng);
  if (length_out) *length_out = n;
  return compose_random_circuit(basis, n_qubits, n, [&](std::size_t) { return gate_dist(rng); });
}

std::vector<GateSpec> two_qubit_compiling_basis() {
  const double step = std::numbers::pi / 128.0;
  std::vector<GateSpec> basis;
  for (double sign : {1.0, -1.0}) basis.push_back(GateSpec::one(GateKind::RZ, 0, sign * step));
  for (double sign : {1.0, -1.0}) basis.push_back(GateSpec::one(GateKind::RZ, 1, sign * step));
  for (double sign : {1.0, -1.0}) basis.push_back(GateSpec::two(GateKind::XX, 0, 1, sign * step));
  for (double sign : {1.0, -1.0}) basis.push_back(GateSpec::two(GateKind::YY, 0, 1, sign * step));
  return basis;
}

UnitaryMatrix random_2q_target(Rng& rng, std::size_t* length_out) {
  return random_circuit_target(two_qubit_compiling_basis(), 2, kTwoQubitTargetMinLength,
                               kTwoQubitTargetMaxLength, rng, length_out);
}

}  // namespace rf::qcore
