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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rotlab/strategies.hpp"

namespace rotlab {

enum class Scenario { Honest, BobMem, BobUsd, BobUsdLimited, AliceMem, AliceUsd };
enum class Metric { CheatProbability, DiscardRate, VerificationPassRate, ReceivedRate };

std::string scenario_name(Scenario s);
std::string metric_name(Metric m);
std::string variant_name(Variant v);

/// "all" expands to every scenario in enum order; unknown names raise
/// ValidationError.
std::vector<Scenario> parse_scenarios(const std::string& name);
Variant parse_variant(const std::string& name);

struct ExperimentConfig {
  std::vector<Scenario> scenarios;
  Variant variant = Variant::Original;
  int runs = 200;
  int n_slots = 2000;
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
  /// Upper bound on runs·n_slots·|scenarios| slot-operations.
  long long budget = 10000000;
};

struct ResultRow {
  Scenario scenario = Scenario::Honest;
  Variant variant = Variant::Original;
  Metric metric = Metric::CheatProbability;
  double estimate = 0.0;
  double std_error = 0.0;
  std::optional<double> analytic;
  bool within_tolerance = false;
  int runs = 0;
  std::uint64_t seed = 0;
};

struct ScenarioArtifacts {
  Scenario scenario = Scenario::Honest;
  std::string first_run_transcript;  // JSONL of run 0
};

/// Monte Carlo over `config.runs` protocol executions of one scenario;
/// per-run seeds derive from the master seed. Metric denominators of zero
/// across all runs produce an error row (NaN estimate, within_tolerance
/// false).
std::vector<ResultRow> run_scenario(Scenario scenario, const ExperimentConfig& config,
                                    std::string* first_run_transcript = nullptr);

/// All configured scenarios in enum order. Throws ValidationError when the
/// slot-operation budget is exceeded.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      std::vector<ScenarioArtifacts>* artifacts = nullptr);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::string rows_to_json(const std::vector<ResultRow>& rows);

/// Serializes rows ("csv" or "json") and, for a non-empty path, writes the
/// file; returns the serialized content. Empty rows or an unknown format
/// raise ValidationError; unwritable paths raise std::runtime_error.
std::string emit(const std::vector<ResultRow>& rows, const std::string& format,
                 const std::string& path);

struct SelfCheckItem {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};

struct SelfCheckReport {
  std::vector<SelfCheckItem> items;
  double max_residual = 0.0;
  bool pass = false;
};

/// Recomputes the analytic table and the structural identities behind it
/// (POVM validity, discrimination values, delayed-measurement consistency
/// on random states) without Monte Carlo; any residual above 1e-9 fails.
SelfCheckReport self_check();

/// AnalyticBounds serialized as a JSON object.
std::string bounds_to_json();

}  // namespace rotlab
