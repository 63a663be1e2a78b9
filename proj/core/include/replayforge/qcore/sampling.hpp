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

#include <cstddef>
#include <functional>
#include <vector>

#include "replayforge/common.hpp"
#include "replayforge/qcore/gates.hpp"
#include "replayforge/qcore/linalg.hpp"

namespace rf::qcore {

/// Haar-random element of U(2^n_qubits): QR of a complex Gaussian matrix with
/// the phases of R's diagonal folded back into Q.
UnitaryMatrix haar_random(int n_qubits, Rng& rng);
UnitaryMatrix haar_random_1q(Rng& rng);

/// Compose `length` gates picked by `pick(k)` from `basis`, left-multiplying
/// as they are drawn: U <- G_k U.
UnitaryMatrix compose_random_circuit(const std::vector<GateSpec>& basis, int n_qubits,
                                     std::size_t length,
                                     const std::function<std::size_t(std::size_t)>& pick);

/// Random-circuit target with length ~ Uniform{min_len..max_len} and gates
/// drawn uniformly from `basis`.
UnitaryMatrix random_circuit_target(const std::vector<GateSpec>& basis, int n_qubits,
                                    std::size_t min_len, std::size_t max_len, Rng& rng,
                                    std::size_t* length_out = nullptr);

/// The 8-element two-qubit compiling basis:
/// RZ(+-pi/128) x I, I x RZ(+-pi/128), XX(+-pi/128), YY(+-pi/128).
std::vector<GateSpec> two_qubit_compiling_basis();

inline constexpr std::size_t kTwoQubitTargetMinLength = 6;
inline constexpr std::size_t kTwoQubitTargetMaxLength = 9999;

/// Two-qubit target generation with N ~ Uniform{6..9999}.
UnitaryMatrix random_2q_target(Rng& rng, std::size_t* length_out = nullptr);

}  // namespace rf::qcore
