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

#include "rotlab/strategies.hpp"

#include <cmath>

namespace rotlab {

namespace {

Povm filter_povm(const TwoStageMeasurement& ts) {
  Povm p;
  p.elements = {ts.pi_s, ts.pi_f};
  p.labels = {"success", "failure"};
  return p;
}

}  // namespace

AnalyticBounds analytic_bounds() {
  AnalyticBounds b;
  b.honest_alice = 0.5;
  b.honest_bob = 0.75;
  b.bob_mem = (3.0 + std::sqrt(3.0)) / 6.0;
  b.bob_usd = 1.0;
  b.bob_rate_limited = 0.5 * b.bob_usd + 0.5 * b.bob_mem;
  b.alice_mem = 0.75;
  b.alice_usd = 1.0;

  const auto [rho_b0, rho_b1] = bob_reduced_states();
  const double bob_num = helstrom(0.5, rho_b0, 0.5, rho_b1).success_probability;
  if (std::abs(bob_num - b.bob_mem) > kTol)
    throw EngineFault("analytic_bounds: receiver Helstrom value drifted from closed form");
  const auto [rho_a0, rho_a1] = alice_reduced_states();
  const double alice_num = helstrom(0.5, rho_a0, 0.5, rho_a1).success_probability;
  if (std::abs(alice_num - b.alice_mem) > kTol)
    throw EngineFault("analytic_bounds: sender Helstrom value drifted from closed form");
  return b;
}

// --- cheating receiver -----------------------------------------------------

CheatingBob::CheatingBob(Mode mode, double mix_weight)
    : mode_(mode),
      mix_weight_(mix_weight),
      two_stage_(build_two_stage(bob_honest_spec())),
      filter_(filter_povm(two_stage_)),
      usd_povm_(bob_usd_povm()) {
  const auto [rho0, rho1] = bob_reduced_states();
  mem_povm_ = helstrom(0.5, rho0, 0.5, rho1).povm;
}

std::string CheatingBob::name() const {
  switch (mode_) {
    case Mode::MinimumError:
      return "bob_mem";
    case Mode::UsdUnbounded:
      return "bob_usd";
    case Mode::UsdRateLimited:
      return "bob_usd_limited";
  }
  return "bob_cheat";
}

bool CheatingBob::measure_phase(SlotState& slot, RngStream& rng) {
  const double p_success =
      outcome_probabilities(slot.quantum_state, filter_, Placement::Second)[0];
  if (!rng.bernoulli(p_success)) return false;
  slot.quantum_state =
      apply_kraus(slot.quantum_state, two_stage_.kraus_s, Placement::Second).first;
  return true;
}

MeasurementRecord CheatingBob::complete_measurement(SlotState& slot, RngStream& rng) {
  const std::vector<double> probs =
      outcome_probabilities(slot.quantum_state, two_stage_.completion, Placement::Second);
  const int idx = pick_outcome(probs, rng);
  const CompletionOutcome id = two_stage_.outcome_ids[idx];
  if (id.branch < 0) throw EngineFault("completion sampled the unreachable element");
  slot.quantum_state =
      apply_kraus(slot.quantum_state, two_stage_.completion_kraus[idx], Placement::Second)
          .first;
  slot.bob_record = MeasurementRecord{id.branch, id.outcome};
  return *slot.bob_record;
}

TestDeclaration CheatingBob::declare_for_test(SlotState& slot, RngStream& rng) {
  const MeasurementRecord rec = complete_measurement(slot, rng);
  return {slot.slot_id, rec.choice, rec.outcome};
}

MeasurementRecord CheatingBob::verification_record(SlotState& slot, RngStream& rng) {
  // Slots the receiver tests are consumed before his own measure phase, so
  // no filter has been applied: verify the honest way.
  return honest_.verification_record(slot, rng);
}

PhiDecision CheatingBob::mem_decision(SlotState& slot, RngStream& rng) {
  const SampleResult s = sample(slot.quantum_state, mem_povm_, Placement::Second, rng);
  slot.quantum_state = s.post_state;
  slot.cheat_scratch = s.outcome;  // guess of c
  return {true, s.outcome, false};
}

PhiDecision CheatingBob::usd_decision(SlotState& slot, RngStream& rng) {
  const SampleResult s = sample(slot.quantum_state, usd_povm_, Placement::Second, rng);
  slot.quantum_state = s.post_state;
  if (s.outcome == 2) return {false, std::nullopt, true};
  slot.cheat_scratch = s.outcome;
  return {true, s.outcome, false};
}

PhiDecision CheatingBob::phi_plus_stage(SlotState& slot, RngStream& rng) {
  switch (mode_) {
    case Mode::MinimumError:
      return mem_decision(slot, rng);
    case Mode::UsdUnbounded:
      return usd_decision(slot, rng);
    case Mode::UsdRateLimited:
      return rng.bernoulli(mix_weight_) ? usd_decision(slot, rng)
                                        : mem_decision(slot, rng);
  }
  throw EngineFault("unknown receiver cheat mode");
}

CheatingBob::OtResponse CheatingBob::respond_ot(SlotState& slot, int b_prime,
                                                RngStream&) {
  if (!slot.cheat_scratch.has_value())
    throw EngineFault("cheating receiver reached transfer without a stored guess");
  const int c_hat = std::any_cast<int>(slot.cheat_scratch);
  OtResponse response;
  response.received = false;
  response.guess_bit = b_prime ^ c_hat;
  return response;
}

// --- cheating sender -------------------------------------------------------

CheatingAlice::CheatingAlice(Mode mode, std::optional<int> forced_d)
    : mode_(mode),
      forced_d_(forced_d),
      two_stage_(build_two_stage(alice_honest_spec())),
      filter_(filter_povm(two_stage_)),
      usd_povm_(alice_usd_measurement()) {
  const auto [rho0, rho1] = alice_reduced_states();
  mem_povm_ = helstrom(0.5, rho0, 0.5, rho1).povm;
}

std::string CheatingAlice::name() const {
  return mode_ == Mode::MinimumError ? "alice_mem" : "alice_usd";
}

bool CheatingAlice::measure_phase(SlotState& slot, RngStream& rng) {
  const double p_success =
      outcome_probabilities(slot.quantum_state, filter_, Placement::First)[0];
  if (!rng.bernoulli(p_success)) return false;
  slot.quantum_state =
      apply_kraus(slot.quantum_state, two_stage_.kraus_s, Placement::First).first;
  return true;
}

MeasurementRecord CheatingAlice::complete_measurement(SlotState& slot, RngStream& rng) {
  const std::vector<double> probs =
      outcome_probabilities(slot.quantum_state, two_stage_.completion, Placement::First);
  const int idx = pick_outcome(probs, rng);
  const CompletionOutcome id = two_stage_.outcome_ids[idx];
  if (id.branch < 0) throw EngineFault("completion sampled the unreachable element");
  slot.quantum_state =
      apply_kraus(slot.quantum_state, two_stage_.completion_kraus[idx], Placement::First)
          .first;
  slot.alice_record = MeasurementRecord{id.branch, id.outcome};
  return *slot.alice_record;
}

TestDeclaration CheatingAlice::declare_for_test(SlotState& slot, RngStream& rng) {
  const MeasurementRecord rec = complete_measurement(slot, rng);
  return {slot.slot_id, rec.choice, rec.outcome};
}

MeasurementRecord CheatingAlice::verification_record(SlotState& slot, RngStream& rng) {
  if (!slot.alice_record) complete_measurement(slot, rng);
  return *slot.alice_record;
}

int CheatingAlice::usd_sample(SlotState& slot, RngStream& rng) {
  if (slot.cheat_scratch.has_value()) return std::any_cast<int>(slot.cheat_scratch);
  const SampleResult s = sample(slot.quantum_state, usd_povm_, Placement::First, rng);
  slot.quantum_state = s.post_state;
  slot.cheat_scratch = s.outcome;
  return s.outcome;
}

int CheatingAlice::select_slot(const std::vector<int>& survivor_ids,
                               std::vector<SlotState>& slots, RngStream& rng) {
  if (mode_ == Mode::MinimumError)
    return survivor_ids[rng.uniform_int(static_cast<int>(survivor_ids.size()))];
  std::vector<int> conclusive;
  std::vector<int> preferred;
  for (int id : survivor_ids) {
    const int outcome = usd_sample(slots[id], rng);
    if (outcome == 2) continue;
    conclusive.push_back(id);
    if (forced_d_ && outcome == *forced_d_) preferred.push_back(id);
  }
  const std::vector<int>& pool = (forced_d_ && !preferred.empty()) ? preferred
                                 : !conclusive.empty()             ? conclusive
                                                                   : survivor_ids;
  return pool[rng.uniform_int(static_cast<int>(pool.size()))];
}

int CheatingAlice::instance_choice_bit(SlotState&, RngStream& rng) {
  // The sender never measured c; an unbiased coin keeps b' distributed
  // exactly as in the honest protocol.
  return rng.uniform_int(2);
}

std::optional<int> CheatingAlice::guess_d(SlotState& slot, RngStream& rng) {
  if (mode_ == Mode::MinimumError) {
    const SampleResult s = sample(slot.quantum_state, mem_povm_, Placement::First, rng);
    slot.quantum_state = s.post_state;
    return s.outcome;
  }
  const int outcome = usd_sample(slot, rng);
  if (outcome == 2) return rng.uniform_int(2);
  return outcome;
}

}  // namespace rotlab
