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

#include "rotlab/protocol.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace rotlab {

namespace {

constexpr double kConsistencyTol = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Unnormalized opposite-side amplitude vector after fixing one factor of a
/// 16-dim state to v (4-dim): w_b = Σ_a v*_a ψ[4a+b] for First, and the
/// transpose pairing for Second.
StateVector amplitude_vector(const StateVector& state, const StateVector& v,
                             Placement where) {
  StateVector w = StateVector::Zero(4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (where == Placement::First)
        w(b) += std::conj(v(a)) * state(4 * a + b);
      else
        w(a) += std::conj(v(b)) * state(4 * a + b);
    }
  return w;
}

struct BasisDraw {
  int outcome = -1;
  double probability = 0.0;
};

/// Samples a projective measurement of `basis` on one factor of the slot
/// state and collapses the state.
BasisDraw sample_basis(SlotState& slot, const std::vector<StateVector>& basis,
                       Placement where, RngStream& rng) {
  std::vector<StateVector> amps;
  std::vector<double> probs;
  amps.reserve(basis.size());
  for (const StateVector& v : basis) {
    amps.push_back(amplitude_vector(slot.quantum_state, v, where));
    probs.push_back(amps.back().squaredNorm());
  }
  const int outcome = pick_outcome(probs, rng);
  StateVector rest = amps[outcome] / std::sqrt(probs[outcome]);
  slot.quantum_state = (where == Placement::First) ? tensor(basis[outcome], rest)
                                                   : tensor(rest, basis[outcome]);
  return {outcome, probs[outcome]};
}

/// Projects one factor of the slot state onto v; returns success and the
/// probability, collapsing the state only on success.
std::pair<bool, double> project_factor(SlotState& slot, const StateVector& v,
                                       Placement where, RngStream& rng) {
  const StateVector w = amplitude_vector(slot.quantum_state, v, where);
  const double p = w.squaredNorm();
  if (rng.uniform() >= p) return {false, p};
  StateVector rest = w / std::sqrt(p);
  slot.quantum_state =
      (where == Placement::First) ? tensor(v, rest) : tensor(rest, v);
  return {true, p};
}

int pick_branch(const HonestMeasurementSpec& spec, RngStream& rng) {
  std::vector<double> probs;
  for (const MeasurementBranch& br : spec.branches) probs.push_back(br.choice_probability);
  return pick_outcome(probs, rng);
}

bool is_success(const MeasurementBranch& br, int outcome) {
  return std::find(br.success_indices.begin(), br.success_indices.end(), outcome) !=
         br.success_indices.end();
}

}  // namespace

std::string party_name(Party p) { return p == Party::Alice ? "alice" : "bob"; }

std::string transcript_to_jsonl(const Transcript& transcript) {
  std::string out;
  for (std::size_t i = 0; i < transcript.size(); ++i) {
    nlohmann::json j;
    j["index"] = i;
    j["sender"] = party_name(transcript[i].sender);
    std::visit(
        Overloaded{
            [&](const PrepareDone& m) {
              j["tag"] = "prepare_done";
              j["payload"] = {{"slot_ids", m.slot_ids}};
            },
            [&](const FailureList& m) {
              j["tag"] = "failure_list";
              j["payload"] = {{"party", party_name(m.party)}, {"slot_ids", m.slot_ids}};
            },
            [&](const TestRequest& m) {
              j["tag"] = "test_request";
              j["payload"] = {{"verifier", party_name(m.verifier)},
                              {"slot_ids", m.slot_ids}};
            },
            [&](const TestDeclaration& m) {
              j["tag"] = "test_declaration";
              j["payload"] = {{"slot_id", m.slot_id},
                              {"choice", m.choice},
                              {"outcome", m.outcome}};
            },
            [&](const TestVerdict& m) {
              j["tag"] = "test_verdict";
              j["payload"] = {{"pass", m.pass}};
            },
            [&](const PhiPlusDiscards& m) {
              j["tag"] = "phi_plus_discards";
              j["payload"] = {{"slot_ids", m.slot_ids}};
            },
            [&](const OtAnnounce& m) {
              j["tag"] = "ot_announce";
              j["payload"] = {{"slot_id", m.slot_id}, {"b_prime", m.b_prime}};
            },
            [&](const AbortNotice& m) {
              j["tag"] = "abort";
              j["payload"] = {{"reason", m.reason}};
            },
        },
        transcript[i].body);
    out += j.dump();
    out += '\n';
  }
  return out;
}

// --- consistency -----------------------------------------------------------

ConsistencyTable::ConsistencyTable() {
  const StateVector psi = protocol_initial_state();
  const HonestMeasurementSpec alice = alice_honest_spec();
  const HonestMeasurementSpec bob = bob_honest_spec();
  for (int ca = 0; ca < 2; ++ca)
    for (int oa = 0; oa < 4; ++oa)
      for (int db = 0; db < 2; ++db)
        for (int ob = 0; ob < 4; ++ob) {
          const StateVector pair =
              tensor(alice.branches[ca].basis[oa], bob.branches[db].basis[ob]);
          const double born = std::norm(pair.dot(psi));
          table_[ca][oa][db][ob] = alice.branches[ca].choice_probability *
                                   bob.branches[db].choice_probability * born;
        }
}

const ConsistencyTable& ConsistencyTable::instance() {
  static const ConsistencyTable table;
  return table;
}

double ConsistencyTable::joint(const MeasurementRecord& alice,
                               const MeasurementRecord& bob) const {
  if (alice.choice < 0 || alice.choice > 1 || bob.choice < 0 || bob.choice > 1 ||
      alice.outcome < 0 || alice.outcome > 3 || bob.outcome < 0 || bob.outcome > 3)
    throw EngineFault("consistency table: record out of range");
  return table_[alice.choice][alice.outcome][bob.choice][bob.outcome];
}

bool ConsistencyTable::consistent(const MeasurementRecord& alice,
                                  const MeasurementRecord& bob) const {
  return joint(alice, bob) > kConsistencyTol;
}

bool verify_declaration(const std::optional<MeasurementRecord>& verifier_record,
                        Party verifier, const TestDeclaration& declared,
                        const ConsistencyTable& table) {
  if (!verifier_record) throw EngineFault("verify_declaration: missing record");
  const MeasurementRecord declared_record{declared.choice, declared.outcome};
  if (verifier == Party::Bob) return table.consistent(declared_record, *verifier_record);
  return table.consistent(*verifier_record, declared_record);
}

bool choice_frequency_check(const std::vector<int>& declared_choices,
                            const std::vector<double>& expected, double tolerance) {
  const std::size_t n = declared_choices.size();
  if (n == 0) return true;
  std::vector<int> counts(expected.size(), 0);
  for (int c : declared_choices) {
    if (c < 0 || c >= static_cast<int>(expected.size()))
      throw EngineFault("choice_frequency_check: choice out of range");
    ++counts[c];
  }
  for (std::size_t b = 0; b < expected.size(); ++b) {
    const double p = expected[b];
    double tol = tolerance;
    if (tol <= 0.0) tol = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    const double freq = static_cast<double>(counts[b]) / static_cast<double>(n);
    if (std::abs(freq - p) > tol) return false;
  }
  return true;
}

// --- strategy defaults -----------------------------------------------------

void AliceStrategy::begin_run(const ProtocolConfig&, RngStream&) {}
void BobStrategy::begin_run(const ProtocolConfig&, RngStream&) {}
StateVector BobStrategy::prepare(RngStream&) {
  static const StateVector psi = protocol_initial_state();
  return psi;
}

// --- honest sender ---------------------------------------------------------

HonestAlice::HonestAlice() : spec_(alice_honest_spec()) {}

bool HonestAlice::measure_phase(SlotState& slot, RngStream& rng) {
  const int c = pick_branch(spec_, rng);
  const BasisDraw draw = sample_basis(slot, spec_.branches[c].basis, Placement::First, rng);
  slot.alice_record = MeasurementRecord{c, draw.outcome};
  return is_success(spec_.branches[c], draw.outcome);
}

TestDeclaration HonestAlice::declare_for_test(SlotState& slot, RngStream&) {
  if (!slot.alice_record) throw EngineFault("honest sender: declaration without record");
  return {slot.slot_id, slot.alice_record->choice, slot.alice_record->outcome};
}

MeasurementRecord HonestAlice::verification_record(SlotState& slot, RngStream&) {
  if (!slot.alice_record) throw EngineFault("honest sender: verification without record");
  return *slot.alice_record;
}

int HonestAlice::select_slot(const std::vector<int>& survivor_ids,
                             std::vector<SlotState>&, RngStream& rng) {
  return survivor_ids[rng.uniform_int(static_cast<int>(survivor_ids.size()))];
}

int HonestAlice::instance_choice_bit(SlotState& slot, RngStream&) {
  if (!slot.alice_record) throw EngineFault("honest sender: instance without record");
  return slot.alice_record->choice;
}

std::optional<int> HonestAlice::guess_d(SlotState&, RngStream&) { return std::nullopt; }

// --- honest receiver -------------------------------------------------------

HonestBob::HonestBob() : spec_(bob_honest_spec()), psi_(protocol_initial_state()) {}

StateVector HonestBob::prepare(RngStream&) { return psi_; }

bool HonestBob::measure_phase(SlotState& slot, RngStream& rng) {
  const int d = pick_branch(spec_, rng);
  const BasisDraw draw = sample_basis(slot, spec_.branches[d].basis, Placement::Second, rng);
  slot.bob_record = MeasurementRecord{d, draw.outcome};
  return is_success(spec_.branches[d], draw.outcome);
}

TestDeclaration HonestBob::declare_for_test(SlotState& slot, RngStream&) {
  if (!slot.bob_record) throw EngineFault("honest receiver: declaration without record");
  return {slot.slot_id, slot.bob_record->choice, slot.bob_record->outcome};
}

MeasurementRecord HonestBob::verification_record(SlotState& slot, RngStream& rng) {
  measure_phase(slot, rng);
  return *slot.bob_record;
}

PhiDecision HonestBob::phi_plus_stage(SlotState& slot, RngStream& rng) {
  if (!slot.bob_record) throw EngineFault("honest receiver: Φ⁺ stage without record");
  if (slot.bob_record->choice != 0) return {true, std::nullopt, false};
  auto [kept, prob] = project_factor(slot, bell(Bell::PhiPlus), Placement::Second, rng);
  (void)prob;
  return {kept, std::nullopt, false};
}

namespace {

/// P(d, outcome, Φ⁺ kept | sender choice c) over the ideal conditional
/// states, computed once by brute force.
struct DecodeTable {
  double likelihood[2][2][4][2];  // [c][d][outcome][kept]

  DecodeTable() {
    auto [psi_c0, psi_c1] = post_alice_states();
    const StateVector* cond[2] = {&psi_c0, &psi_c1};
    const HonestMeasurementSpec spec = bob_honest_spec();
    const StateVector phi_plus = bell(Bell::PhiPlus);
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d) {
        const MeasurementBranch& br = spec.branches[d];
        for (int o = 0; o < 4; ++o) {
          const StateVector w = amplitude_vector(*cond[c], br.basis[o], Placement::Second);
          const double p_outcome = br.choice_probability * w.squaredNorm();
          // Φ⁺ projection applies to d=0 only; d=1 slots are always kept.
          double p_keep = 1.0;
          if (d == 0) p_keep = std::norm(phi_plus.dot(br.basis[o]));
          likelihood[c][d][o][1] = p_outcome * p_keep;
          likelihood[c][d][o][0] = p_outcome * (1.0 - p_keep);
        }
      }
  }
};

const DecodeTable& decode_table() {
  static const DecodeTable table;
  return table;
}

}  // namespace

double HonestBob::data_likelihood(int c, int d, int outcome, bool phi_kept) {
  if (c < 0 || c > 1 || d < 0 || d > 1 || outcome < 0 || outcome > 3)
    throw EngineFault("data_likelihood: argument out of range");
  return decode_table().likelihood[c][d][outcome][phi_kept ? 1 : 0];
}

HonestBob::OtResponse HonestBob::respond_ot(SlotState& slot, int b_prime, RngStream& rng) {
  if (!slot.bob_record) throw EngineFault("honest receiver: transfer without record");
  const int d = slot.bob_record->choice;
  const int o = slot.bob_record->outcome;
  const double l0 = data_likelihood(0, d, o, true);
  const double l1 = data_likelihood(1, d, o, true);
  const double top = std::max(l0, l1);
  OtResponse response;
  if (std::min(l0, l1) < kConsistencyTol * top) {
    const int c_hat = (l1 > l0) ? 1 : 0;
    response.received = true;
    response.decoded_bit = b_prime ^ c_hat;
    response.guess_bit = b_prime ^ c_hat;
  } else {
    response.received = false;
    response.guess_bit = rng.uniform_int(2);
  }
  return response;
}

// --- engine ----------------------------------------------------------------

RunResult run_protocol(const ProtocolConfig& config, AliceStrategy& alice,
                       BobStrategy& bob) {
  if (config.n_slots <= 0) throw ValidationError("run_protocol: n_slots must be positive");
  if (config.test_fraction <= 0.0 || config.test_fraction >= 1.0)
    throw ValidationError("run_protocol: test_fraction must lie in (0,1)");

  RunResult result;
  RunStatistics& stats = result.statistics;
  RngStream rng(config.rng_seed);
  const ConsistencyTable& table = ConsistencyTable::instance();
  alice.begin_run(config, rng);
  bob.begin_run(config, rng);

  std::vector<SlotState> slots;
  slots.reserve(config.n_slots);
  std::vector<int> all_ids(config.n_slots);
  for (int i = 0; i < config.n_slots; ++i) {
    SlotState slot;
    slot.slot_id = i;
    slot.quantum_state = bob.prepare(rng);
    slots.push_back(std::move(slot));
    all_ids[i] = i;
  }
  result.transcript.push_back({Party::Bob, PrepareDone{all_ids}});

  const auto active_ids = [&slots] {
    std::vector<int> ids;
    for (const SlotState& slot : slots)
      if (slot.status == SlotStatus::Active) ids.push_back(slot.slot_id);
    return ids;
  };
  const auto finalize = [&stats] {
    stats.verification_pass_rate =
        stats.declarations > 0
            ? static_cast<double>(stats.declaration_passes) / stats.declarations
            : 1.0;
  };
  const auto abort_run = [&](Party sender, const std::string& reason) {
    result.aborted = true;
    result.abort_reason = reason;
    result.transcript.push_back({sender, AbortNotice{reason}});
    finalize();
  };

  // Sender measure phase + failure announcements.
  {
    std::vector<int> fails;
    int successes = 0;
    for (SlotState& slot : slots) {
      if (alice.measure_phase(slot, rng)) {
        ++successes;
      } else {
        slot.status = SlotStatus::DiscardedAliceFail;
        fails.push_back(slot.slot_id);
      }
    }
    stats.alice_success_rate = static_cast<double>(successes) / config.n_slots;
    result.transcript.push_back({Party::Alice, FailureList{Party::Alice, fails}});
  }

  // One measure-verify test block; declarer/verifier roles alternate.
  const auto run_test_block = [&](Party verifier, const std::vector<double>& expected,
                                  SlotStatus tested_status) -> bool {
    std::vector<int> candidates = active_ids();
    const int k = static_cast<int>(
        std::ceil(config.test_fraction * static_cast<double>(candidates.size())));
    std::vector<int> chosen = rng.sample_without_replacement(candidates, k);
    std::sort(chosen.begin(), chosen.end());
    result.transcript.push_back({verifier, TestRequest{verifier, chosen}});

    std::vector<int> declared_choices;
    bool all_consistent = true;
    for (int id : chosen) {
      SlotState& slot = slots[id];
      slot.status = tested_status;
      const TestDeclaration decl = (verifier == Party::Bob)
                                       ? alice.declare_for_test(slot, rng)
                                       : bob.declare_for_test(slot, rng);
      if (decl.slot_id != id) throw EngineFault("declaration names the wrong slot");
      const Party declarer = (verifier == Party::Bob) ? Party::Alice : Party::Bob;
      result.transcript.push_back({declarer, decl});
      const MeasurementRecord record = (verifier == Party::Bob)
                                           ? bob.verification_record(slot, rng)
                                           : alice.verification_record(slot, rng);
      const bool ok = verify_declaration(record, verifier, decl, table);
      ++stats.declarations;
      if (ok) ++stats.declaration_passes;
      all_consistent = all_consistent && ok;
      declared_choices.push_back(decl.choice);
    }
    const bool freq_ok = choice_frequency_check(declared_choices, expected,
                                                config.choice_frequency_tolerance);
    const bool pass = all_consistent && freq_ok;
    result.transcript.push_back({verifier, TestVerdict{pass}});
    if (!pass)
      abort_run(verifier, party_name(verifier) + std::string(": test block failed (") +
                              (all_consistent ? "choice frequencies" : "inconsistent declaration") +
                              ")");
    return pass;
  };

  if (!run_test_block(Party::Bob, {0.5, 0.5}, SlotStatus::TestedByBob)) return result;

  // Receiver measure phase + failure announcements.
  {
    std::vector<int> fails;
    int successes = 0;
    const std::vector<int> ids = active_ids();
    for (int id : ids) {
      SlotState& slot = slots[id];
      if (bob.measure_phase(slot, rng)) {
        ++successes;
      } else {
        slot.status = SlotStatus::DiscardedBobFail;
        fails.push_back(id);
      }
    }
    stats.bob_success_rate =
        ids.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(ids.size());
    result.transcript.push_back({Party::Bob, FailureList{Party::Bob, fails}});
  }

  if (!run_test_block(Party::Alice, {2.0 / 3.0, 1.0 / 3.0}, SlotStatus::TestedByAlice))
    return result;

  // Φ⁺ stage.
  {
    std::vector<int> discards;
    for (int id : active_ids()) {
      SlotState& slot = slots[id];
      const PhiDecision decision = bob.phi_plus_stage(slot, rng);
      ++stats.phi_stage_slots;
      if (decision.c_guess.has_value() || decision.discard_request) {
        if (!slot.alice_record)
          throw EngineFault("receiver guess recorded without a sender record");
        result.bob_guesses.push_back(
            {id, slot.alice_record->choice, decision.c_guess.value_or(-1)});
      }
      if (!decision.keep) {
        slot.status = SlotStatus::DiscardedPhiPlus;
        discards.push_back(id);
        ++stats.phi_stage_discards;
      }
    }
    result.transcript.push_back({Party::Bob, PhiPlusDiscards{discards}});
    stats.phi_plus_discard_rate =
        stats.phi_stage_slots > 0
            ? static_cast<double>(stats.phi_stage_discards) / stats.phi_stage_slots
            : 0.0;
    if (config.variant == Variant::Modified && stats.phi_stage_slots > 0) {
      double tol = config.discard_monitor_tolerance;
      if (tol <= 0.0)
        tol = 4.0 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / stats.phi_stage_slots);
      if (stats.phi_plus_discard_rate > 1.0 / 3.0 + tol) {
        abort_run(Party::Alice, "alice: discard monitor tripped");
        return result;
      }
    }
  }

  // Final transfer phase.
  {
    const std::vector<int> survivors = active_ids();
    if (survivors.empty()) {
      abort_run(Party::Alice, "alice: no surviving slots");
      return result;
    }
    std::vector<int> instance_ids;
    if (config.variant == Variant::Original) {
      const int selected = alice.select_slot(survivors, slots, rng);
      if (std::find(survivors.begin(), survivors.end(), selected) == survivors.end())
        throw EngineFault("selected slot is not a survivor");
      slots[selected].status = SlotStatus::Selected;
      instance_ids.push_back(selected);
    } else {
      instance_ids = survivors;
      for (int id : instance_ids) slots[id].status = SlotStatus::OtInstance;
    }
    for (int id : instance_ids) {
      SlotState& slot = slots[id];
      const int b = rng.uniform_int(2);
      const int c = alice.instance_choice_bit(slot, rng);
      const int b_prime = b ^ c;
      result.transcript.push_back({Party::Alice, OtAnnounce{id, b_prime}});
      const BobStrategy::OtResponse response = bob.respond_ot(slot, b_prime, rng);
      result.ot_instances.push_back(
          {id, b, c, b_prime, response.received, response.decoded_bit, response.guess_bit});
      if (const std::optional<int> guess = alice.guess_d(slot, rng)) {
        if (!slot.bob_record)
          throw EngineFault("sender guess recorded without a receiver record");
        result.alice_guesses.push_back({id, slot.bob_record->choice, *guess});
      }
    }
  }

  finalize();
  return result;
}

}  // namespace rotlab
