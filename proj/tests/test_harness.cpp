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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "rotlab/harness.hpp"

using namespace rotlab;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.scenarios = {Scenario::Honest};
  config.runs = 4;
  config.n_slots = 300;
  config.seed = 20260501;
  return config;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("names round-trip through the parsers") {
  CHECK(scenario_name(Scenario::Honest) == "honest");
  CHECK(scenario_name(Scenario::BobMem) == "bob_mem");
  CHECK(scenario_name(Scenario::BobUsd) == "bob_usd");
  CHECK(scenario_name(Scenario::BobUsdLimited) == "bob_usd_limited");
  CHECK(scenario_name(Scenario::AliceMem) == "alice_mem");
  CHECK(scenario_name(Scenario::AliceUsd) == "alice_usd");
  CHECK(metric_name(Metric::CheatProbability) == "cheat_probability");
  CHECK(metric_name(Metric::DiscardRate) == "discard_rate");
  CHECK(metric_name(Metric::VerificationPassRate) == "verification_pass_rate");
  CHECK(metric_name(Metric::ReceivedRate) == "received_rate");
  CHECK(variant_name(Variant::Original) == "original");
  CHECK(variant_name(Variant::Modified) == "modified");
  for (const char* name :
       {"honest", "bob_mem", "bob_usd", "bob_usd_limited", "alice_mem", "alice_usd"}) {
    const std::vector<Scenario> parsed = parse_scenarios(name);
    REQUIRE(parsed.size() == 1);
    CHECK(scenario_name(parsed[0]) == name);
  }
  CHECK(parse_variant("original") == Variant::Original);
  CHECK(parse_variant("modified") == Variant::Modified);
}

TEST_CASE("'all' expands to every scenario in a fixed order") {
  const std::vector<Scenario> all = parse_scenarios("all");
  REQUIRE(all.size() == 6);
  CHECK(all[0] == Scenario::Honest);
  CHECK(all[1] == Scenario::BobMem);
  CHECK(all[2] == Scenario::BobUsd);
  CHECK(all[3] == Scenario::BobUsdLimited);
  CHECK(all[4] == Scenario::AliceMem);
  CHECK(all[5] == Scenario::AliceUsd);
  CHECK_THROWS_AS(parse_scenarios("nope"), ValidationError);
  CHECK_THROWS_AS(parse_variant("nope"), ValidationError);
}

TEST_CASE("per-run seeds are distinct and deterministic") {
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 64; ++i) seen.insert(derive_run_seed(99, i));
  CHECK(seen.size() == 64);
  CHECK(derive_run_seed(99, 7) == derive_run_seed(99, 7));
  CHECK(derive_run_seed(99, 7) != derive_run_seed(100, 7));
}

TEST_CASE("honest scenario rows carry the expected metrics in enum order") {
  const std::vector<ResultRow> rows = run_scenario(Scenario::Honest, small_config());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].metric == Metric::DiscardRate);
  CHECK(rows[1].metric == Metric::VerificationPassRate);
  CHECK(rows[2].metric == Metric::ReceivedRate);
  for (const ResultRow& row : rows) {
    CHECK(row.scenario == Scenario::Honest);
    CHECK(row.runs == 4);
    CHECK(row.seed == 20260501);
    REQUIRE(row.analytic.has_value());
  }
  CHECK(*rows[0].analytic == doctest::Approx(1.0 / 3.0));
  CHECK(*rows[1].analytic == 1.0);
  CHECK(*rows[2].analytic == 0.5);
  CHECK(rows[1].estimate == 1.0);
  CHECK(rows[1].within_tolerance);
}

TEST_CASE("cheating scenarios add the cheat row and drop the received row") {
  ExperimentConfig config = small_config();
  const std::vector<ResultRow> bob = run_scenario(Scenario::BobMem, config);
  REQUIRE(bob.size() == 3);
  CHECK(bob[0].metric == Metric::CheatProbability);
  CHECK(*bob[0].analytic == doctest::Approx((3.0 + std::sqrt(3.0)) / 6.0));
  CHECK(*bob[1].analytic == 0.0);  // the Helstrom receiver never discards

  const std::vector<ResultRow> alice = run_scenario(Scenario::AliceMem, config);
  REQUIRE(alice.size() == 4);
  CHECK(alice[0].metric == Metric::CheatProbability);
  CHECK(alice[3].metric == Metric::ReceivedRate);
  CHECK(*alice[0].analytic == 0.75);
}

TEST_CASE("the modified variant swaps the USD sender's analytic target") {
  ExperimentConfig config = small_config();
  config.variant = Variant::Modified;
  const std::vector<ResultRow> rows = run_scenario(Scenario::AliceUsd, config);
  CHECK(rows[0].metric == Metric::CheatProbability);
  CHECK(*rows[0].analytic == 0.75);

  const std::vector<ResultRow> original = run_scenario(Scenario::AliceUsd, small_config());
  CHECK(*original[0].analytic == 1.0);
}

TEST_CASE("an unreachable metric produces a NaN error row") {
  // A single slot is always consumed by the test block, so no run reaches
  // the announcement phase and the received-rate denominator stays zero.
  ExperimentConfig config = small_config();
  config.runs = 6;
  config.n_slots = 1;
  const std::vector<ResultRow> rows = run_scenario(Scenario::Honest, config);
  REQUIRE(rows.size() == 3);
  CHECK(std::isnan(rows[2].estimate));
  CHECK(std::isnan(rows[2].std_error));
  CHECK_FALSE(rows[2].within_tolerance);
  // Slots that survive the source filter still get tested and verified.
  CHECK(rows[1].estimate == 1.0);
}

TEST_CASE("experiments honor the slot budget and scenario order") {
  ExperimentConfig config = small_config();
  config.scenarios = parse_scenarios("all");
  config.runs = 1000;
  config.n_slots = 2000;  // 1000*2000*6 > default budget
  CHECK_THROWS_AS(run_experiment(config), ValidationError);

  config = small_config();
  config.scenarios = {Scenario::BobUsd, Scenario::Honest};  // out of order on purpose
  std::vector<ScenarioArtifacts> artifacts;
  const std::vector<ResultRow> rows = run_experiment(config, &artifacts);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].scenario == Scenario::Honest);
  CHECK(rows[3].scenario == Scenario::BobUsd);
  REQUIRE(artifacts.size() == 2);
  CHECK(artifacts[0].scenario == Scenario::Honest);
  CHECK(artifacts[1].scenario == Scenario::BobUsd);
  CHECK(!artifacts[0].first_run_transcript.empty());
  // The artifact matches a direct scenario run with the same seed.
  std::string direct;
  run_scenario(Scenario::Honest, config, &direct);
  CHECK(artifacts[0].first_run_transcript == direct);
}

TEST_CASE("CSV output starts with the exact header and one line per row") {
  const std::vector<ResultRow> rows = run_scenario(Scenario::Honest, small_config());
  const std::string csv = rows_to_csv(rows);
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line ==
        "scenario,variant,metric,estimate,std_error,analytic,within_tolerance,runs,seed");
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    CHECK(line.rfind("honest,original,", 0) == 0);
  }
  CHECK(count == 3);
}

TEST_CASE("JSON output parses and mirrors the row fields") {
  const std::vector<ResultRow> rows = run_scenario(Scenario::Honest, small_config());
  const nlohmann::json parsed = nlohmann::json::parse(rows_to_json(rows));
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 3);
  for (const nlohmann::json& row : parsed) {
    CHECK(row.at("scenario") == "honest");
    CHECK(row.at("variant") == "original");
    CHECK(row.at("runs") == 4);
    CHECK(row.at("within_tolerance").is_boolean());
    CHECK(row.at("estimate").is_number());
  }
  CHECK(parsed[1].at("metric") == "verification_pass_rate");
  CHECK(parsed[1].at("analytic") == 1.0);

  // A row without an analytic target serializes it as null.
  ResultRow bare;
  bare.metric = Metric::CheatProbability;
  const nlohmann::json lone = nlohmann::json::parse(rows_to_json({bare}));
  CHECK(lone[0].at("analytic").is_null());
}

TEST_CASE("emit writes the serialized content and validates its inputs") {
  const std::vector<ResultRow> rows = run_scenario(Scenario::Honest, small_config());
  const std::string path = "harness_emit_test.csv";
  const std::string content = emit(rows, "csv", path);
  CHECK(content == rows_to_csv(rows));
  CHECK(slurp(path) == content);
  std::remove(path.c_str());

  CHECK(emit(rows, "json", "") == rows_to_json(rows));
  CHECK_THROWS_AS(emit({}, "csv", ""), ValidationError);
  CHECK_THROWS_AS(emit(rows, "xml", ""), ValidationError);
  CHECK_THROWS_AS(emit(rows, "csv", "no-such-dir/out.csv"), std::runtime_error);
}

TEST_CASE("repeated experiments are byte-identical") {
  ExperimentConfig config = small_config();
  config.scenarios = {Scenario::Honest, Scenario::AliceMem};
  std::vector<ScenarioArtifacts> first_artifacts, second_artifacts;
  const std::string first = rows_to_csv(run_experiment(config, &first_artifacts));
  const std::string second = rows_to_csv(run_experiment(config, &second_artifacts));
  CHECK(first == second);
  REQUIRE(first_artifacts.size() == second_artifacts.size());
  for (std::size_t i = 0; i < first_artifacts.size(); ++i)
    CHECK(first_artifacts[i].first_run_transcript ==
          second_artifacts[i].first_run_transcript);
}

TEST_CASE("the self check closes every structural identity") {
  const SelfCheckReport report = self_check();
  CHECK(report.pass);
  CHECK(report.max_residual < 1e-9);
  CHECK(report.items.size() >= 10);
  for (const SelfCheckItem& item : report.items) {
    CAPTURE(item.name);
    CHECK(item.pass);
    CHECK(item.residual >= 0.0);
  }
}

TEST_CASE("the analytic table serializes with every field") {
  const nlohmann::json parsed = nlohmann::json::parse(bounds_to_json());
  const AnalyticBounds bounds = analytic_bounds();
  CHECK(parsed.at("honest_alice") == bounds.honest_alice);
  CHECK(parsed.at("honest_bob") == bounds.honest_bob);
  CHECK(parsed.at("bob_mem") == doctest::Approx(bounds.bob_mem));
  CHECK(parsed.at("bob_usd") == bounds.bob_usd);
  CHECK(parsed.at("bob_rate_limited") == doctest::Approx(bounds.bob_rate_limited));
  CHECK(parsed.at("alice_mem") == bounds.alice_mem);
  CHECK(parsed.at("alice_usd") == bounds.alice_usd);
}
