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

#include "replayforge/qcore/hamiltonian.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rf::qcore {
namespace {

// P = i^{nY} X^x Z^z, so P|j> = i^{nY} (-1)^{popcount(j & z)} |j ^ x>.
struct PauliMasks {
  std::size_t x = 0;
  std::size_t z = 0;
  Complex phase{1.0, 0.0};
};

PauliMasks masks_for(const std::string& paulis) {
  PauliMasks m;
  const int n = static_cast<int>(paulis.size());
  int n_y = 0;
  for (int q = 0; q < n; ++q) {
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    switch (paulis[static_cast<std::size_t>(q)]) {
      case 'I': break;
      case 'X': m.x |= bit; break;
      case 'Y': m.x |= bit; m.z |= bit; ++n_y; break;
      case 'Z': m.z |= bit; break;
      default: throw std::invalid_argument("invalid Pauli character");
    }
  }
  static constexpr Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  m.phase = kPowers[n_y % 4];
  return m;
}

inline double parity_sign(std::size_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

void validate_term(const PauliTerm& t, int n_qubits) {
  if (!std::isfinite(t.coefficient)) throw std::invalid_argument("Hamiltonian coefficient is not finite");
  if (static_cast<int>(t.paulis.size()) != n_qubits) {
    throw std::invalid_argument("Pauli string '" + t.paulis + "' does not have length " +
                                std::to_string(n_qubits));
  }
  for (char c : t.paulis) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
      throw std::invalid_argument("Pauli string '" + t.paulis + "' has characters outside IXYZ");
    }
  }
}

}  // namespace

PauliSumHamiltonian::PauliSumHamiltonian(int n_qubits, std::vector<PauliTerm> terms)
    : n_qubits_(n_qubits), terms_(std::move(terms)) {
  if (n_qubits < 1) throw std::invalid_argument("Hamiltonian needs at least one qubit");
  for (const auto& t : terms_) validate_term(t, n_qubits_);
}

PauliSumHamiltonian PauliSumHamiltonian::scaled(double factor) const {
  auto terms = terms_;
  for (auto& t : terms) t.coefficient *= factor;
  return PauliSumHamiltonian(n_qubits_, std::move(terms));
}

CMatrix PauliSumHamiltonian::dense() const {
  const auto dim = Eigen::Index{1} << n_qubits_;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (const auto& t : terms_) {
    const PauliMasks m = masks_for(t.paulis);
    for (std::size_t j = 0; j < static_cast<std::size_t>(dim); ++j) {
      h(static_cast<Eigen::Index>(j ^ m.x), static_cast<Eigen::Index>(j)) +=
          t.coefficient * m.phase * parity_sign(j & m.z);
    }
  }
  return h;
}

double PauliSumHamiltonian::coefficient_lower_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient);
  return -s;
}

PauliSumHamiltonian PauliSumHamiltonian::parse(std::istream& in) {
  int n_qubits = -1;
  std::vector<PauliTerm> terms;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (n_qubits < 0) {
      if (first != "qubits:") throw ConfigError(where + "expected 'qubits: <n>' header");
      if (!(ls >> n_qubits) || n_qubits < 1) throw ConfigError(where + "invalid qubit count");
      continue;
    }
    PauliTerm term;
    try {
      std::size_t used = 0;
      term.coefficient = std::stod(first, &used);
      if (used != first.size()) throw std::invalid_argument(first);
    } catch (const std::exception&) {
      throw ConfigError(where + "invalid coefficient '" + first + "'");
    }
    if (!(ls >> term.paulis)) throw ConfigError(where + "missing Pauli string");
    std::string extra;
    if (ls >> extra) throw ConfigError(where + "trailing text '" + extra + "'");
    try {
      validate_term(term, n_qubits);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + e.what());
    }
    terms.push_back(std::move(term));
  }
  if (n_qubits < 0) throw ConfigError("Hamiltonian file has no 'qubits:' header");
  return PauliSumHamiltonian(n_qubits, std::move(terms));
}

PauliSumHamiltonian PauliSumHamiltonian::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open Hamiltonian file " + path.string());
  return parse(in);
}

std::string PauliSumHamiltonian::to_text() const {
  std::ostringstream os;
  os << "qubits: " << n_qubits_ << "\n";
  os << std::setprecision(17);
  for (const auto& t : terms_) os << t.coefficient << " " << t.paulis << "\n";
  return os.str();
}

PauliSumHamiltonian heisenberg_hamiltonian(int n) {
  if (n < 2) throw std::invalid_argument("Heisenberg chain needs at least two sites");
  std::vector<PauliTerm> terms;
  for (int i = 0; i + 1 < n; ++i) {
    for (char p : {'X', 'Y', 'Z'}) {
      std::string s(static_cast<std::size_t>(n), 'I');
      s[static_cast<std::size_t>(i)] = p;
      s[static_cast<std::size_t>(i + 1)] = p;
      terms.push_back({1.0, std::move(s)});
    }
  }
  for (int i = 0; i < n; ++i) {
    std::string s(static_cast<std::size_t>(n), 'I');
    s[static_cast<std::size_t>(i)] = 'Z';
    terms.push_back({1.0, std::move(s)});
  }
  return PauliSumHamiltonian(n, std::move(terms));
}

double expectation(const PauliSumHamiltonian& h, const Statevector& state) {
  if (h.n_qubits() != state.n_qubits()) throw std::invalid_argument("expectation: qubit-count mismatch");
  const CVector& psi = state.amplitudes();
  const auto dim = static_cast<std::size_t>(psi.size());
  Complex total = 0.0;
  for (const auto& t : h.terms()) {
    const PauliMasks m = masks_for(t.paulis);
    Complex acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      acc += std::conj(psi(static_cast<Eigen::Index>(j ^ m.x))) * psi(static_cast<Eigen::Index>(j)) *
             parity_sign(j & m.z);
    }
    total += t.coefficient * m.phase * acc;
  }
  if (std::abs(total.imag()) > 1e-9) throw NumericError("expectation has a non-negligible imaginary part");
  return total.real();
}

double expectation(const PauliSumHamiltonian& h, const DensityMatrix& rho) {
  if (h.n_qubits() != rho.n_qubits()) throw std::invalid_argument("expectation: qubit-count mismatch");
  const CMatrix& r = rho.matrix();
  const auto dim = static_cast<std::size_t>(r.rows());
  Complex total = 0.0;
  for (const auto& t : h.terms()) {
    const PauliMasks m = masks_for(t.paulis);
    Complex acc = 0.0;
    // Tr(P rho) = sum_k P_{k^x, k} rho_{k, k^x}
    for (std::size_t k = 0; k < dim; ++k) {
      acc += parity_sign(k & m.z) * r(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k ^ m.x));
    }
    total += t.coefficient * m.phase * acc;
  }
  if (std::abs(total.imag()) > 1e-9) throw NumericError("expectation has a non-negligible imaginary part");
  return total.real();
}

GroundState ground_state(const PauliSumHamiltonian& h) {
  if (h.n_qubits() > 12) throw std::invalid_argument("dense diagonalization is limited to 12 qubits");
  const Eigen::MatrixXcd dense = h.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  GroundState gs;
  gs.energy = solver.eigenvalues()(0);
  gs.vector = solver.eigenvectors().col(0);
  return gs;
}

double exact_ground_energy(const PauliSumHamiltonian& h) { return ground_state(h).energy; }

double trajectory_expectation(const Circuit& circuit, int n_qubits, const NoiseModel& noise,
                              const PauliSumHamiltonian& h, int trajectories, Rng& rng) {
  if (trajectories < 1) throw std::invalid_argument("need at least one trajectory");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double sum = 0.0;
  for (int t = 0; t < trajectories; ++t) {
    Statevector psi(n_qubits);
    for (const auto& g : circuit) {
      psi.apply(g);
      const int k = g.arity();
      const double p = k == 1 ? noise.p1 : noise.p2;
      if (p <= 0.0 || unit(rng) >= p) continue;
      const int n_paulis = (1 << (2 * k)) - 1;
      std::uniform_int_distribution<int> pick(1, n_paulis);
      const int code = pick(rng);
      const std::array<int, 2> labels{k == 1 ? code : code / 4, code % 4};
      for (int i = 0; i < k; ++i) {
        if (labels[static_cast<std::size_t>(i)] == 0) continue;
        CMatrix pm(2, 2);
        switch (labels[static_cast<std::size_t>(i)]) {
          case 1: pm << 0, 1, 1, 0; break;
          case 2: pm << 0, Complex(0, -1), Complex(0, 1), 0; break;
          default: pm << 1, 0, 0, -1; break;
        }
        const int q = g.qubits[static_cast<std::size_t>(i)];
        psi.apply_local(pm, std::span<const int>(&q, 1));
      }
    }
    sum += expectation(h, psi);
  }
  return sum / trajectories;
}

}  // namespace rf::qcore
