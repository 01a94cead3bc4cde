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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rotlab/harness.hpp"

namespace {

int cmd_run(const std::string& scenario, const std::string& variant, int runs, int slots,
            std::uint64_t seed, double test_fraction, long long budget,
            const std::string& format, const std::string& out_path,
            const std::string& transcript_out) {
  rotlab::ExperimentConfig config;
  config.scenarios = rotlab::parse_scenarios(scenario);
  config.variant = rotlab::parse_variant(variant);
  config.runs = runs;
  config.n_slots = slots;
  config.seed = seed;
  config.test_fraction = test_fraction;
  config.budget = budget;

  std::vector<rotlab::ScenarioArtifacts> artifacts;
  const std::vector<rotlab::ResultRow> rows = rotlab::run_experiment(
      config, transcript_out.empty() ? nullptr : &artifacts);
  const std::string content = rotlab::emit(rows, format, out_path);
  if (out_path.empty()) std::cout << content;

  if (!transcript_out.empty()) {
    std::ofstream out(transcript_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + transcript_out);
    for (const rotlab::ScenarioArtifacts& art : artifacts) {
      std::istringstream lines(art.first_run_transcript);
      std::string line;
      while (std::getline(lines, line)) {
        nlohmann::json j = nlohmann::json::parse(line);
        j["scenario"] = rotlab::scenario_name(art.scenario);
        j["run"] = 0;
        out << j.dump() << '\n';
      }
    }
    if (!out) throw std::runtime_error("write failed: " + transcript_out);
  }

  for (const rotlab::ResultRow& row : rows)
    if (!row.within_tolerance) return 1;
  return 0;
}

int cmd_self_check() {
  const rotlab::SelfCheckReport report = rotlab::self_check();
  for (const rotlab::SelfCheckItem& item : report.items) {
    std::cout << (item.pass ? "ok   " : "FAIL ") << item.name
              << "  residual=" << item.residual << '\n';
  }
  std::cout << (report.pass ? "self-check passed" : "self-check FAILED")
            << " (max residual " << report.max_residual << ")\n";
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rabin oblivious transfer simulator: honest runs, cheating strategies, "
               "and analytic cross-checks"};
  app.require_subcommand(1);

  std::string scenario = "all";
  std::string variant = "original";
  int runs = 200;
  int slots = 2000;
  std::uint64_t seed = 0;
  double test_fraction = 0.25;
  long long budget = 10000000;
  std::string format = "csv";
  std::string out_path;
  std::string transcript_out;

  CLI::App* run = app.add_subcommand("run", "Monte Carlo scenario estimates");
  run->add_option("--scenario", scenario,
                  "honest|bob_mem|bob_usd|bob_usd_limited|alice_mem|alice_usd|all")
      ->capture_default_str();
  run->add_option("--variant", variant, "original|modified")->capture_default_str();
  run->add_option("--runs", runs, "protocol executions per scenario")
      ->capture_default_str();
  run->add_option("--slots", slots, "slots per execution")->capture_default_str();
  run->add_option("--seed", seed, "master seed")->capture_default_str();
  run->add_option("--test-fraction", test_fraction, "fraction tested per block")
      ->capture_default_str();
  run->add_option("--budget", budget, "max runs*slots*scenarios")->capture_default_str();
  run->add_option("--format", format, "json|csv")->capture_default_str();
  run->add_option("--out", out_path, "output file (default: stdout)");
  run->add_option("--transcript-out", transcript_out,
                  "JSONL dump of run 0 of each scenario");

  app.add_subcommand("self-check", "recompute the analytic table and report residuals");
  app.add_subcommand("bounds", "print the analytic probability table as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return cmd_run(scenario, variant, runs, slots, seed, test_fraction, budget, format,
                     out_path, transcript_out);
    if (app.get_subcommand("self-check")->parsed()) return cmd_self_check();
    if (app.get_subcommand("bounds")->parsed()) {
      std::cout << rotlab::bounds_to_json();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "rot-lab: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
