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

#include <optional>

#include "rotlab/protocol.hpp"

namespace rotlab {

/// Closed-form cheating/success probabilities the simulator is expected to
/// reproduce. bob_rate_limited = mix·bob_usd + (1−mix)·bob_mem at mix = 1/2.
struct AnalyticBounds {
  double honest_alice = 0.5;
  double honest_bob = 0.75;
  double bob_mem = 0.0;
  double bob_usd = 1.0;
  double bob_rate_limited = 0.0;
  double alice_mem = 0.75;
  double alice_usd = 1.0;
};

/// Returns the closed-form table; bob_mem and alice_mem are additionally
/// recomputed at runtime via helstrom() on the constructed density pairs and
/// must agree within 1e-9 (EngineFault otherwise).
AnalyticBounds analytic_bounds();

/// Receiver strategies that delay the honest measurement behind a
/// success/failure filter and discriminate the sender's choice c at the
/// Φ⁺ stage.
class CheatingBob : public BobStrategy {
 public:
  enum class Mode { MinimumError, UsdUnbounded, UsdRateLimited };

  explicit CheatingBob(Mode mode, double mix_weight = 0.5);

  std::string name() const override;
  bool measure_phase(SlotState& slot, RngStream& rng) override;
  TestDeclaration declare_for_test(SlotState& slot, RngStream& rng) override;
  MeasurementRecord verification_record(SlotState& slot, RngStream& rng) override;
  PhiDecision phi_plus_stage(SlotState& slot, RngStream& rng) override;
  OtResponse respond_ot(SlotState& slot, int b_prime, RngStream& rng) override;

 private:
  MeasurementRecord complete_measurement(SlotState& slot, RngStream& rng);
  PhiDecision usd_decision(SlotState& slot, RngStream& rng);
  PhiDecision mem_decision(SlotState& slot, RngStream& rng);

  Mode mode_;
  double mix_weight_;
  TwoStageMeasurement two_stage_;
  Povm filter_;
  Povm mem_povm_;
  Povm usd_povm_;
  HonestBob honest_;
};

/// Sender strategies that delay the honest measurement and discriminate the
/// receiver's choice d per transfer instance; UsdSelect additionally picks
/// the instance slot among conclusively identified ones (original variant).
class CheatingAlice : public AliceStrategy {
 public:
  enum class Mode { MinimumError, UsdSelect };

  explicit CheatingAlice(Mode mode, std::optional<int> forced_d = std::nullopt);

  std::string name() const override;
  bool measure_phase(SlotState& slot, RngStream& rng) override;
  TestDeclaration declare_for_test(SlotState& slot, RngStream& rng) override;
  MeasurementRecord verification_record(SlotState& slot, RngStream& rng) override;
  int select_slot(const std::vector<int>& survivor_ids, std::vector<SlotState>& slots,
                  RngStream& rng) override;
  int instance_choice_bit(SlotState& slot, RngStream& rng) override;
  std::optional<int> guess_d(SlotState& slot, RngStream& rng) override;

 private:
  MeasurementRecord complete_measurement(SlotState& slot, RngStream& rng);
  int usd_sample(SlotState& slot, RngStream& rng);

  Mode mode_;
  std::optional<int> forced_d_;
  TwoStageMeasurement two_stage_;
  Povm filter_;
  Povm mem_povm_;
  Povm usd_povm_;
};

}  // namespace rotlab
