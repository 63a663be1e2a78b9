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

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "replayforge/qcore/gates.hpp"
#include "replayforge/qcore/hamiltonian.hpp"
#include "replayforge/qcore/sampling.hpp"
#include "replayforge/qcore/state.hpp"

using namespace rf::qcore;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

// Random mixed state: sum_k w_k |psi_k><psi_k| with Haar columns.
DensityMatrix random_density(int n, rf::Rng& rng) {
  const UnitaryMatrix u = haar_random(n, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(u.dim());
  std::vector<double> w(static_cast<std::size_t>(d));
  double total = 0.0;
  for (auto& x : w) total += (x = unit(rng));
  CMatrix rho = CMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const CVector col = u.matrix().col(k);
    rho += (w[static_cast<std::size_t>(k)] / total) * (col * col.adjoint());
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  return DensityMatrix(n, rho);
}

Statevector random_state(int n, rf::Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector a(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = Complex(g(rng), g(rng));
  a.normalize();
  return Statevector(n, a);
}

GateSpec random_gate(int n, rf::Rng& rng) {
  static const GateKind kinds[] = {GateKind::RX,  GateKind::RY,  GateKind::RZ, GateKind::CNOT,
                                   GateKind::RXX, GateKind::RYY, GateKind::RZZ, GateKind::XX,
                                   GateKind::YY,  GateKind::V1,  GateKind::V2,  GateKind::V3};
  std::uniform_int_distribution<int> kd(0, 11), qd(0, n - 1);
  std::uniform_real_distribution<double> ad(-kPi, kPi);
  const GateKind k = kinds[kd(rng)];
  std::optional<double> angle;
  if (gate_is_parameterized(k)) angle = ad(rng);
  const int q0 = qd(rng);
  if (gate_arity(k) == 1) return GateSpec::one(k, q0, angle);
  int q1 = qd(rng);
  while (q1 == q0) q1 = qd(rng);
  return GateSpec::two(k, q0, q1, angle);
}

}  // namespace

TEST(GateMatrix, ZeroRotationIsIdentity) {
  const auto u = gate_matrix(GateSpec::one(GateKind::RZ, 0, 0.0), 1);
  EXPECT_LT((u.matrix() - CMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(GateMatrix, HrcV1MatchesClosedForm) {
  const auto u = gate_matrix(GateSpec::one(GateKind::V1, 0), 1);
  const double s = 1.0 / std::sqrt(5.0);
  EXPECT_NEAR(std::abs(u(0, 0) - Complex(s, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(0, 1) - Complex(0, 2 * s)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 0) - Complex(0, 2 * s)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 1) - Complex(s, 0)), 0.0, 1e-15);
}

TEST(GateMatrix, SmallRotationMatchesMatrixExponential) {
  const double theta = kPi / 128;
  const auto u = gate_matrix(GateSpec::one(GateKind::RX, 0, theta), 1);
  EXPECT_NEAR(u(0, 0).real(), std::cos(kPi / 256), 1e-15);
  EXPECT_NEAR(u(0, 1).imag(), -std::sin(kPi / 256), 1e-15);
  // Independent oracle: exp(-i theta/2 X) via Eigen's matrix exponential.
  Eigen::MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  const Eigen::MatrixXcd oracle = (Complex(0, -theta / 2) * x).exp();
  EXPECT_LT((Eigen::MatrixXcd(u.matrix()) - oracle).norm(), 1e-14);

  Eigen::MatrixXcd xx = Eigen::kroneckerProduct(x, x);
  const Eigen::MatrixXcd oracle_xx = (Complex(0, -theta / 2) * xx).exp();
  const auto rxx = gate_matrix(GateSpec::two(GateKind::RXX, 0, 1, theta), 2);
  EXPECT_LT((Eigen::MatrixXcd(rxx.matrix()) - oracle_xx).norm(), 1e-14);
}

TEST(GateMatrix, CnotControlIsFirstQubitAndMostSignificant) {
  const auto u = gate_matrix(GateSpec::two(GateKind::CNOT, 0, 1), 2);
  // |10> (index 2) -> |11> (index 3)
  EXPECT_EQ(u(3, 2), Complex(1.0));
  EXPECT_EQ(u(0, 0), Complex(1.0));
  const auto rev = gate_matrix(GateSpec::two(GateKind::CNOT, 1, 0), 2);
  // |01> (index 1) -> |11>
  EXPECT_EQ(rev(3, 1), Complex(1.0));
}

TEST(GateMatrix, EveryGateIsUnitary) {
  rf::Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 4;
    if (n == 1) continue;
    const GateSpec g = random_gate(n, rng);
    EXPECT_LT(unitarity_defect(gate_matrix(g, n).matrix()), 1e-10) << g.to_string();
  }
  for (auto k : {GateKind::RX, GateKind::RY, GateKind::RZ}) {
    EXPECT_LT(unitarity_defect(gate_matrix(GateSpec::one(k, 0, 0.3), 1).matrix()), 1e-10);
  }
}

TEST(GateMatrix, RejectsBadSpecs) {
  EXPECT_THROW(gate_matrix(GateSpec::one(GateKind::RX, 2, 0.1), 2), std::invalid_argument);
  EXPECT_THROW(gate_matrix(GateSpec::one(GateKind::RX, 0), 1), std::invalid_argument);
  EXPECT_THROW(gate_matrix(GateSpec::two(GateKind::CNOT, 1, 1), 2), std::invalid_argument);
  EXPECT_THROW(gate_matrix(GateSpec::one(GateKind::V1, 0, 0.2), 1), std::invalid_argument);
}

TEST(GateMatrix, EmbeddingAgreesWithStatevectorApplication) {
  rf::Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const GateSpec g = random_gate(3, rng);
    Statevector psi = random_state(3, rng);
    const CVector expected = gate_matrix(g, 3).matrix() * psi.amplitudes();
    psi.apply(g);
    EXPECT_LT((psi.amplitudes() - expected).norm(), 1e-12) << g.to_string();
  }
}

TEST(Fidelity, BasicValues) {
  rf::Rng rng(3);
  const auto u = haar_random(2, rng);
  EXPECT_NEAR(fidelity(u, u), 1.0, 1e-12);
  const auto id = UnitaryMatrix::identity(1);
  const auto x = gate_matrix(GateSpec::one(GateKind::RX, 0, kPi), 1);  // -iX
  EXPECT_NEAR(fidelity(id, x), 0.0, 1e-15);
  const auto rz = gate_matrix(GateSpec::one(GateKind::RZ, 0, kPi / 128), 1);
  EXPECT_NEAR(fidelity(id, rz), std::cos(kPi / 256), 1e-15);
  // numeric cross-check of the trace
  const Complex tr = (id.matrix().adjoint() * rz.matrix()).trace();
  EXPECT_NEAR(std::abs(tr) / 2.0, std::cos(kPi / 256), 1e-15);
  EXPECT_NEAR(fidelity(id, rz, FidelityKind::TraceSquared), std::pow(std::cos(kPi / 256), 2), 1e-15);
}

TEST(Fidelity, SymmetricPhaseInvariantBounded) {
  rf::Rng rng(5);
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  for (int i = 0; i < 200; ++i) {
    const auto a = haar_random(2, rng);
    const auto b = haar_random(2, rng);
    const double fab = fidelity(a, b);
    EXPECT_NEAR(fab, fidelity(b, a), 1e-14);
    EXPECT_GE(fab, 0.0);
    EXPECT_LE(fab, 1.0);
    const UnitaryMatrix shifted(CMatrix(std::exp(kI * phase(rng)) * a.matrix()));
    EXPECT_NEAR(fidelity(a, shifted), 1.0, 1e-12);
  }
  EXPECT_THROW(fidelity(UnitaryMatrix::identity(1), UnitaryMatrix::identity(2)), std::invalid_argument);
}

TEST(Haar, DrawsAreUnitaryAndSeedDependent) {
  rf::Rng rng(1);
  for (int i = 0; i < 10000; ++i) ASSERT_LT(unitarity_defect(haar_random_1q(rng).matrix()), 1e-10);
  rf::Rng a(100), b(101);
  EXPECT_GT((haar_random_1q(a).matrix() - haar_random_1q(b).matrix()).norm(), 1e-3);
}

TEST(Haar, MomentsMatchHaarMeasure) {
  // E|Tr U|^2 = 1 and E|Tr U|/2 = 4/(3 pi) for Haar U(2).
  rf::Rng rng(2024);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0, sum_abs = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto u = haar_random_1q(rng);
    const double t2 = std::norm(u.matrix().trace());
    sum += t2;
    sum_sq += t2 * t2;
    sum_abs += std::sqrt(t2) / 2.0;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - 1.0), 3.0 * se);
  EXPECT_NEAR(sum_abs / n, 4.0 / (3.0 * kPi), 0.005);
}

TEST(RandomTargets, TwoQubitTargetsAreUnitaryWithLengthInRange) {
  rf::Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    std::size_t len = 0;
    const auto u = random_2q_target(rng, &len);
    EXPECT_EQ(u.dim(), 4u);
    EXPECT_LT(unitarity_defect(u.matrix()), 1e-9);
    EXPECT_GE(len, 6u);
    EXPECT_LE(len, 9999u);
  }
}

TEST(RandomTargets, ForcedRzSequenceAddsAngles) {
  const auto basis = two_qubit_compiling_basis();
  ASSERT_EQ(basis.size(), 8u);
  const auto u = compose_random_circuit(basis, 2, 6, [](std::size_t) { return std::size_t{0}; });
  const auto expected = gate_matrix(GateSpec::one(GateKind::RZ, 0, 6 * kPi / 128), 2);
  EXPECT_LT((u.matrix() - expected.matrix()).norm(), 1e-12);
}

TEST(Depolarizing, IdentityAtZeroAndTracePreserving) {
  rf::Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix rho = random_density(3, rng);
    const std::array<int, 1> q1{1};
    const std::array<int, 2> q2{2, 0};
    EXPECT_LT((apply_depolarizing(rho, q1, 0.0).matrix() - rho.matrix()).norm(), 1e-15);
    std::uniform_real_distribution<double> pd(0.0, 1.0);
    const double p = pd(rng);
    const auto out1 = apply_depolarizing(rho, q1, p);
    const auto out2 = apply_depolarizing(rho, q2, p);
    EXPECT_NEAR(std::abs(out1.trace() - Complex(1.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(out2.trace() - Complex(1.0)), 0.0, 1e-12);
    EXPECT_LT(out2.hermiticity_defect(), 1e-10);
    EXPECT_GE(out2.min_eigenvalue(), -1e-8);
  }
}

TEST(Depolarizing, FullStrengthMixesUniformlyOverNonIdentityPaulis) {
  const std::array<int, 1> q{0};
  // (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z) on |0><0|:
  // p = 1 gives diag(1/3, 2/3); the maximally mixed point is p = 3/4.
  const auto full = apply_depolarizing(DensityMatrix(1), q, 1.0);
  EXPECT_NEAR(full.matrix()(0, 0).real(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(full.matrix()(1, 1).real(), 2.0 / 3.0, 1e-15);
  const auto mixed = apply_depolarizing(DensityMatrix(2), q, 0.75);
  const CMatrix reduced = mixed.reduced_single(0);
  EXPECT_LT((reduced - 0.5 * CMatrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_THROW(apply_depolarizing(DensityMatrix(1), q, 1.5), std::invalid_argument);
  EXPECT_THROW(apply_depolarizing(DensityMatrix(1), q, -0.1), std::invalid_argument);
}

TEST(Depolarizing, KrausOperatorsAreComplete) {
  for (int k : {1, 2}) {
    for (double p : {0.0, 0.001, 0.3, 1.0}) {
      const auto kraus = depolarizing_kraus(k, p);
      EXPECT_EQ(kraus.size(), static_cast<std::size_t>(1 << (2 * k)));
      CMatrix acc = CMatrix::Zero(1 << k, 1 << k);
      for (const auto& m : kraus) acc += m.adjoint() * m;
      EXPECT_LT((acc - CMatrix::Identity(1 << k, 1 << k)).norm(), 1e-10);
    }
  }
}

TEST(Depolarizing, KrausSumAgreesWithChannel) {
  rf::Rng rng(23);
  const DensityMatrix rho = random_density(2, rng);
  const std::array<int, 2> q{0, 1};
  const auto kraus = depolarizing_kraus(2, 0.37);
  CMatrix expected = CMatrix::Zero(4, 4);
  for (const auto& k : kraus) expected += k * rho.matrix() * k.adjoint();
  EXPECT_LT((apply_depolarizing(rho, q, 0.37).matrix() - expected).norm(), 1e-12);
}

TEST(Hamiltonian, HeisenbergTermCounts) {
  const auto h2 = heisenberg_hamiltonian(2);
  EXPECT_EQ(h2.terms().size(), 5u);
  for (const auto& t : h2.terms()) EXPECT_EQ(t.coefficient, 1.0);
  EXPECT_EQ(heisenberg_hamiltonian(5).terms().size(), 17u);
  EXPECT_THROW(heisenberg_hamiltonian(1), std::invalid_argument);
}

TEST(Hamiltonian, ExpectationBasics) {
  const PauliSumHamiltonian z(1, {{1.0, "Z"}});
  EXPECT_NEAR(expectation(z, Statevector(1)), 1.0, 1e-15);

  CVector singlet = CVector::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  const Statevector s(2, singlet);
  EXPECT_NEAR(expectation(heisenberg_hamiltonian(2), s), -3.0, 1e-12);
  EXPECT_NEAR(expectation(heisenberg_hamiltonian(2), DensityMatrix(s)), -3.0, 1e-12);
  EXPECT_THROW(expectation(heisenberg_hamiltonian(2), Statevector(3)), std::invalid_argument);
}

TEST(Hamiltonian, ExpectationMatchesDenseOracle) {
  rf::Rng rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  const char letters[] = {'I', 'X', 'Y', 'Z'};
  std::uniform_int_distribution<int> ld(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PauliTerm> terms;
    for (int k = 0; k < 6; ++k) {
      std::string s;
      for (int q = 0; q < 3; ++q) s.push_back(letters[ld(rng)]);
      terms.push_back({g(rng), s});
    }
    const PauliSumHamiltonian h(3, terms);
    const Statevector psi = random_state(3, rng);
    const CVector& a = psi.amplitudes();
    const double dense = (a.adjoint() * h.dense() * a)(0).real();
    EXPECT_NEAR(expectation(h, psi), dense, 1e-9);
    const DensityMatrix rho = random_density(3, rng);
    EXPECT_NEAR(expectation(h, rho), (h.dense() * rho.matrix()).trace().real(), 1e-9);
    // linear in coefficients
    const double lambda = g(rng);
    EXPECT_NEAR(expectation(h.scaled(lambda), psi), lambda * expectation(h, psi), 1e-9);
  }
}

TEST(Hamiltonian, StatevectorAndDensityBackendsAgree) {
  rf::Rng rng(41);
  const auto h = heisenberg_hamiltonian(3);
  for (int trial = 0; trial < 30; ++trial) {
    Circuit c;
    for (int k = 0; k < 12; ++k) c.push_back(random_gate(3, rng));
    EXPECT_NEAR(expectation(h, simulate(c, 3)), expectation(h, simulate_noisy(c, 3, NoiseModel{})), 1e-9);
  }
}

TEST(GroundState, KnownSpectra) {
  EXPECT_NEAR(exact_ground_energy(PauliSumHamiltonian(1, {{1.0, "Z"}})), -1.0, 1e-12);
  const auto h = heisenberg_hamiltonian(2);
  const GroundState gs = ground_state(h);
  EXPECT_NEAR(gs.energy, -3.0, 1e-10);
  const Eigen::MatrixXcd dense = h.dense();
  EXPECT_LT((dense * gs.vector - gs.energy * gs.vector).norm(), 1e-8);
  for (int n = 3; n <= 5; ++n) {
    const auto hn = heisenberg_hamiltonian(n);
    const auto g = ground_state(hn);
    EXPECT_LT((Eigen::MatrixXcd(hn.dense()) * g.vector - g.energy * g.vector).norm(), 1e-8);
    EXPECT_GE(g.energy, hn.coefficient_lower_bound());
  }
  const PauliSumHamiltonian big(13, {{1.0, std::string(13, 'Z')}});
  EXPECT_THROW(exact_ground_energy(big), std::invalid_argument);
}

TEST(HamiltonianFile, ParsesCommentsAndBlankLines) {
  std::istringstream in("# water fragment\nqubits: 2\n\n1.0 XX   # coupling\n0.5 ZI\n");
  const auto h = PauliSumHamiltonian::parse(in);
  EXPECT_EQ(h.n_qubits(), 2);
  ASSERT_EQ(h.terms().size(), 2u);
  EXPECT_EQ(h.terms()[1], (PauliTerm{0.5, "ZI"}));
  std::istringstream again(h.to_text());
  const auto h2 = PauliSumHamiltonian::parse(again);
  EXPECT_EQ(h2.terms(), h.terms());
}

TEST(HamiltonianFile, RejectsMalformedInput) {
  for (const char* text : {"1.0 XX\n", "qubits: 2\n1.0 XXX\n", "qubits: 2\nabc XX\n", "qubits: 2\n1.0 XQ\n",
                           "qubits: 2\n1.0\n", "qubits: x\n", ""}) {
    std::istringstream in(text);
    EXPECT_THROW(PauliSumHamiltonian::parse(in), rf::ConfigError) << text;
  }
  EXPECT_THROW(PauliSumHamiltonian::load("/nonexistent/h.txt"), rf::IoError);
}

TEST(Trajectories, AgreeWithExactDensityEvolution) {
  rf::Rng rng(77);
  Circuit c;
  for (int k = 0; k < 10; ++k) c.push_back(random_gate(3, rng));
  const NoiseModel noise{0.05, 0.1};
  const auto h = heisenberg_hamiltonian(3);
  const double exact = expectation(h, simulate_noisy(c, 3, noise));
  const double sampled = trajectory_expectation(c, 3, noise, h, 4000, rng);
  EXPECT_NEAR(sampled, exact, 0.1);
  EXPECT_NEAR(trajectory_expectation(c, 3, NoiseModel{}, h, 1, rng), expectation(h, simulate(c, 3)), 1e-12);
}
