// Copyright 2026 The rot-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rotlab/linalg.hpp"

namespace rotlab {

// Four-qubit protocol geometry: the sender (Alice) holds qubits 0-1, the
// receiver (Bob) holds qubits 2-3. A 16-dim composite index is a*4+b with
// a the sender's two-qubit index and b the receiver's.

enum class Bell { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

/// Computational basis vector e_index of the given dimension.
StateVector basis_ket(int dim, int index);

/// Single-qubit computational ("+" basis) state |x⟩, x ∈ {0,1}.
StateVector computational_ket(int x);

/// Single-qubit diagonal ("×" basis) state (|0⟩ + (−1)^x |1⟩)/√2.
StateVector diagonal_ket(int x);

StateVector bell(Bell label);

/// The entangled four-qubit state the receiver prepares for every slot.
StateVector protocol_initial_state();

/// The two normalized post-filter states conditioned on the sender's
/// measurement choice c succeeding: (c=0, c=1).
std::pair<StateVector, StateVector> post_alice_states();

/// The receiver-side density matrices to be discriminated when the
/// receiver delays his measurement: (c=0, c=1), 4-dim computational
/// coordinates.
std::pair<ComplexMatrix, ComplexMatrix> bob_reduced_states();

/// The sender-side density matrices to be discriminated when the sender
/// delays her measurement: (d=0, d=1).
std::pair<ComplexMatrix, ComplexMatrix> alice_reduced_states();

/// Orthonormal triple (φ₀, φ₁, φ₂) spanning the support of both
/// sender-side densities: φ₀ common, φ₁ only in d=1, φ₂ only in d=0.
std::array<StateVector, 3> phi_basis();

/// Embeds a 3×3 operator written in {Φ⁺, Ψ⁺, Φ⁻} coordinates into the
/// 4-dim two-qubit space (Ψ⁻ direction untouched).
ComplexMatrix embed_bell_span(const ComplexMatrix& m3);

/// Named payloads for validation sweeps.
struct NamedState {
  std::string name;
  std::variant<StateVector, ComplexMatrix> payload;
};
std::vector<NamedState> named_states();

}  // namespace rotlab
