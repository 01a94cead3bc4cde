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

#include <string>
#include <utility>
#include <vector>

#include "rotlab/linalg.hpp"
#include "rotlab/rng.hpp"
#include "rotlab/states.hpp"

namespace rotlab {

/// Which factor of a bipartite state an operator acts on. First/Second embed
/// the operator as k⊗I or I⊗k; the complementary dimension is inferred from
/// the state and operator sizes.
enum class Placement { Full, First, Second };

struct Povm {
  std::vector<ComplexMatrix> elements;
  std::vector<std::string> labels;
};

/// Throws ValidationError unless all elements are Hermitian PSD and sum to
/// the identity within tol.
void validate_povm(const Povm& povm, double tol = kTol);

/// Born-rule probabilities Tr(Π_i ρ).
std::vector<double> outcome_distribution(const ComplexMatrix& rho, const Povm& povm);

/// One projective branch of an honest two-choice measurement: the branch is
/// picked with choice_probability, then the basis is measured; outcomes in
/// success_indices count as protocol successes.
struct MeasurementBranch {
  double choice_probability = 0.0;
  std::vector<StateVector> basis;
  std::vector<int> success_indices;
};

struct HonestMeasurementSpec {
  std::vector<MeasurementBranch> branches;
};

void validate_spec(const HonestMeasurementSpec& spec, double tol = kTol);

/// The sender's honest measurement: branch c=0 the Bell basis with
/// successes {Φ⁻, Ψ⁺}, branch c=1 the (diag ⊗ comp) product basis with
/// successes {0×0+, 1×1+}; both branches equiprobable.
HonestMeasurementSpec alice_honest_spec();

/// The receiver's honest measurement: branch d=0 the computational basis
/// (prob 2/3), branch d=1 the (diag ⊗ diag) basis (prob 1/3); successes are
/// the equal-bit outcomes {00, 11} in each.
HonestMeasurementSpec bob_honest_spec();

/// Success/failure coarse-graining: Πs = Σ_branch q · Σ_success Π_i,
/// Πf = I − Πs.
std::pair<ComplexMatrix, ComplexMatrix> coarse_grain(const HonestMeasurementSpec& spec);

/// Identifies a completion-POVM element with its honest (branch, outcome)
/// pair; {-1, -1} marks the unreachable complement element.
struct CompletionOutcome {
  int branch = -1;
  int outcome = -1;
};

/// Delayed realization of an honest measurement: a success/failure filter
/// applied now (Kraus √Πs) and a completing POVM applied later whose joint
/// statistics reproduce the honest fine-grained measurement exactly.
struct TwoStageMeasurement {
  ComplexMatrix pi_s;
  ComplexMatrix pi_f;
  ComplexMatrix kraus_s;
  Povm completion;
  std::vector<ComplexMatrix> completion_kraus;  // √(element), index-aligned
  std::vector<CompletionOutcome> outcome_ids;
};

TwoStageMeasurement build_two_stage(const HonestMeasurementSpec& spec);

/// Applies k (embedded per placement) to the state; returns the renormalized
/// post state and the outcome probability ‖k̂ψ‖². Throws
/// ImpossibleOutcomeError when the probability is ≤ 1e-12.
std::pair<StateVector, double> apply_kraus(const StateVector& state, const ComplexMatrix& k,
                                           Placement where = Placement::Full);

/// Embedded Born probabilities of each POVM element on a pure state;
/// values in [−1e-12, 0) are clamped to 0.
std::vector<double> outcome_probabilities(const StateVector& state, const Povm& povm,
                                          Placement where = Placement::Full);

/// Draws an index from an (almost) normalized probability vector.
int pick_outcome(const std::vector<double>& probs, RngStream& rng);

struct SampleResult {
  int outcome = -1;
  StateVector post_state;
  double probability = 0.0;
};

/// Samples a POVM outcome on the state; the post state uses the √-element
/// Kraus convention.
SampleResult sample(const StateVector& state, const Povm& povm, Placement where,
                    RngStream& rng);

struct DiscriminationResult {
  double success_probability = 0.0;
  Povm povm;
  enum class Kind { MinimumError, Unambiguous } kind = Kind::MinimumError;
};

/// Minimum-error discrimination of {(p0, ρ0), (p1, ρ1)}: success probability
/// ½(1 + Tr|p0ρ0 − p1ρ1|); the POVM projects onto the strictly-positive
/// eigenspace of p0ρ0 − p1ρ1 (guess 0), ties assigned to guess 1.
DiscriminationResult helstrom(double p0, const ComplexMatrix& rho0, double p1,
                              const ComplexMatrix& rho1);

/// Receiver's unambiguous discrimination of his two conditioned densities:
/// elements (conclude c=0, conclude c=1, inconclusive), 4-dim.
Povm bob_usd_povm();

/// Sender's unambiguous discrimination of her two conditioned densities via
/// the φ basis: (conclude d=0, conclude d=1, inconclusive).
Povm alice_usd_measurement();

}  // namespace rotlab
