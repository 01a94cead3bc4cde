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

#include <any>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rotlab/measurement.hpp"

namespace rotlab {

enum class Variant { Original, Modified };
enum class Party { Alice, Bob };

std::string party_name(Party p);

struct ProtocolConfig {
  int n_slots = 2000;
  double test_fraction = 0.25;
  Variant variant = Variant::Original;
  /// Modified variant: allowed excess of the Φ⁺-stage discard fraction over
  /// 1/3; values ≤ 0 select a 4σ binomial band.
  double discard_monitor_tolerance = 0.0;
  /// Declared-choice frequency band per branch; values ≤ 0 select 4σ.
  double choice_frequency_tolerance = 0.0;
  std::uint64_t rng_seed = 0;
};

enum class SlotStatus {
  Active,
  DiscardedAliceFail,
  DiscardedBobFail,
  DiscardedPhiPlus,
  TestedByBob,
  TestedByAlice,
  Selected,
  OtInstance,
};

struct MeasurementRecord {
  int choice = -1;   // measurement choice bit (c or d)
  int outcome = -1;  // outcome index within the chosen basis
};

struct SlotState {
  int slot_id = -1;
  StateVector quantum_state;  // 16-dim ideal-simulation ground truth
  SlotStatus status = SlotStatus::Active;
  std::optional<MeasurementRecord> alice_record;
  std::optional<MeasurementRecord> bob_record;
  std::any cheat_scratch;  // opaque per-strategy storage
};

// --- classical channel -----------------------------------------------------

struct PrepareDone {
  std::vector<int> slot_ids;
};
struct FailureList {
  Party party = Party::Alice;
  std::vector<int> slot_ids;
};
struct TestRequest {
  Party verifier = Party::Alice;
  std::vector<int> slot_ids;
};
struct TestDeclaration {
  int slot_id = -1;
  int choice = -1;
  int outcome = -1;
};
struct TestVerdict {
  bool pass = false;
};
struct PhiPlusDiscards {
  std::vector<int> slot_ids;
};
struct OtAnnounce {
  int slot_id = -1;
  int b_prime = -1;
};
struct AbortNotice {
  std::string reason;
};

struct Message {
  Party sender = Party::Alice;
  std::variant<PrepareDone, FailureList, TestRequest, TestDeclaration, TestVerdict,
               PhiPlusDiscards, OtAnnounce, AbortNotice>
      body;
};
using Transcript = std::vector<Message>;

/// One JSON object per message: {"index":…,"payload":…,"sender":…,"tag":…}.
std::string transcript_to_jsonl(const Transcript& transcript);

// --- results ---------------------------------------------------------------

struct OtInstance {
  int slot_id = -1;
  int alice_bit = -1;     // b
  int alice_choice = -1;  // c as announced through b'
  int b_prime = -1;
  bool bob_received = false;
  std::optional<int> bob_decoded_bit;
  int bob_guess = -1;  // receiver's guess of b
};

/// A cheater's recorded guess; guess = -1 encodes a discard request in place
/// of a guess (inconclusive discrimination).
struct GuessRecord {
  int slot_id = -1;
  int truth = -1;
  int guess = -1;
};

struct RunStatistics {
  double alice_success_rate = 0.0;
  double bob_success_rate = 0.0;
  double phi_plus_discard_rate = 0.0;
  double verification_pass_rate = 1.0;
  int phi_stage_slots = 0;
  int phi_stage_discards = 0;
  int declarations = 0;
  int declaration_passes = 0;
};

struct RunResult {
  Transcript transcript;
  bool aborted = false;
  std::string abort_reason;
  std::vector<OtInstance> ot_instances;
  RunStatistics statistics;
  std::vector<GuessRecord> bob_guesses;    // receiver's guesses of c (Φ⁺ stage)
  std::vector<GuessRecord> alice_guesses;  // sender's guesses of d (final phase)
};

// --- verification ----------------------------------------------------------

/// Joint probabilities of (sender choice+outcome, receiver choice+outcome)
/// under ideal honest execution of one slot, brute-forced from the protocol
/// state; "consistent" means joint probability > 1e-9.
class ConsistencyTable {
 public:
  static const ConsistencyTable& instance();

  double joint(const MeasurementRecord& alice, const MeasurementRecord& bob) const;
  bool consistent(const MeasurementRecord& alice, const MeasurementRecord& bob) const;

 private:
  ConsistencyTable();
  double table_[2][4][2][4];
};

/// True iff the declared (choice, outcome) is jointly possible with the
/// verifier's own record. Throws EngineFault on a missing record.
bool verify_declaration(const std::optional<MeasurementRecord>& verifier_record,
                        Party verifier, const TestDeclaration& declared,
                        const ConsistencyTable& table);

/// True iff each branch's empirical frequency lies within tolerance of the
/// expected probability; tolerance ≤ 0 selects 4·√(p(1−p)/n) per branch.
bool choice_frequency_check(const std::vector<int>& declared_choices,
                            const std::vector<double>& expected, double tolerance);

// --- strategy plugins ------------------------------------------------------

class AliceStrategy {
 public:
  virtual ~AliceStrategy() = default;
  virtual std::string name() const = 0;
  virtual void begin_run(const ProtocolConfig& config, RngStream& rng);

  /// Measure phase on one slot; collapses the slot state, returns success.
  virtual bool measure_phase(SlotState& slot, RngStream& rng) = 0;

  /// Declaration for a slot the receiver is testing.
  virtual TestDeclaration declare_for_test(SlotState& slot, RngStream& rng) = 0;

  /// The record used to verify the receiver's declaration for a tested slot.
  virtual MeasurementRecord verification_record(SlotState& slot, RngStream& rng) = 0;

  /// Original variant only: pick the slot used for the transfer.
  virtual int select_slot(const std::vector<int>& survivor_ids,
                          std::vector<SlotState>& slots, RngStream& rng) = 0;

  /// The choice bit c folded into b' for an instance slot.
  virtual int instance_choice_bit(SlotState& slot, RngStream& rng) = 0;

  /// A cheating sender's guess of the receiver's choice d; honest senders
  /// return nullopt.
  virtual std::optional<int> guess_d(SlotState& slot, RngStream& rng) = 0;
};

/// Outcome of the receiver's Φ⁺-stage hook for one surviving slot.
struct PhiDecision {
  bool keep = true;
  std::optional<int> c_guess;   // cheating receiver's guess of c
  bool discard_request = false; // inconclusive discrimination: ask to discard
};

class BobStrategy {
 public:
  virtual ~BobStrategy() = default;
  virtual std::string name() const = 0;
  virtual void begin_run(const ProtocolConfig& config, RngStream& rng);

  /// State preparation for one slot.
  virtual StateVector prepare(RngStream& rng);

  virtual bool measure_phase(SlotState& slot, RngStream& rng) = 0;

  virtual TestDeclaration declare_for_test(SlotState& slot, RngStream& rng) = 0;

  /// Measures the tested slot the honest way and returns the record used to
  /// verify the sender's declaration.
  virtual MeasurementRecord verification_record(SlotState& slot, RngStream& rng) = 0;

  virtual PhiDecision phi_plus_stage(SlotState& slot, RngStream& rng) = 0;

  struct OtResponse {
    bool received = false;
    std::optional<int> decoded_bit;
    int guess_bit = -1;
  };
  virtual OtResponse respond_ot(SlotState& slot, int b_prime, RngStream& rng) = 0;
};

// --- honest parties --------------------------------------------------------

class HonestAlice : public AliceStrategy {
 public:
  HonestAlice();
  std::string name() const override { return "honest_alice"; }
  bool measure_phase(SlotState& slot, RngStream& rng) override;
  TestDeclaration declare_for_test(SlotState& slot, RngStream& rng) override;
  MeasurementRecord verification_record(SlotState& slot, RngStream& rng) override;
  int select_slot(const std::vector<int>& survivor_ids, std::vector<SlotState>& slots,
                  RngStream& rng) override;
  int instance_choice_bit(SlotState& slot, RngStream& rng) override;
  std::optional<int> guess_d(SlotState& slot, RngStream& rng) override;

 private:
  HonestMeasurementSpec spec_;
};

class HonestBob : public BobStrategy {
 public:
  HonestBob();
  std::string name() const override { return "honest_bob"; }
  StateVector prepare(RngStream& rng) override;
  bool measure_phase(SlotState& slot, RngStream& rng) override;
  TestDeclaration declare_for_test(SlotState& slot, RngStream& rng) override;
  MeasurementRecord verification_record(SlotState& slot, RngStream& rng) override;
  PhiDecision phi_plus_stage(SlotState& slot, RngStream& rng) override;
  OtResponse respond_ot(SlotState& slot, int b_prime, RngStream& rng) override;

  /// Likelihood of the receiver's classical slot data (d, outcome, Φ⁺ kept)
  /// under sender choice c, from the ideal conditional table.
  static double data_likelihood(int c, int d, int outcome, bool phi_kept);

 private:
  HonestMeasurementSpec spec_;
  StateVector psi_;
};

/// Runs one full protocol execution. Strategy protocol-order violations
/// raise EngineFault; in-protocol failures produce an aborted RunResult.
RunResult run_protocol(const ProtocolConfig& config, AliceStrategy& alice,
                       BobStrategy& bob);

}  // namespace rotlab
