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

#include "rotlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

#include <json.hpp>

namespace rotlab {

namespace {

constexpr Scenario kAllScenarios[] = {Scenario::Honest,        Scenario::BobMem,
                                      Scenario::BobUsd,        Scenario::BobUsdLimited,
                                      Scenario::AliceMem,      Scenario::AliceUsd};

bool bob_cheats(Scenario s) {
  return s == Scenario::BobMem || s == Scenario::BobUsd || s == Scenario::BobUsdLimited;
}
bool alice_cheats(Scenario s) {
  return s == Scenario::AliceMem || s == Scenario::AliceUsd;
}

std::unique_ptr<AliceStrategy> make_alice(Scenario s) {
  switch (s) {
    case Scenario::AliceMem:
      return std::make_unique<CheatingAlice>(CheatingAlice::Mode::MinimumError);
    case Scenario::AliceUsd:
      return std::make_unique<CheatingAlice>(CheatingAlice::Mode::UsdSelect);
    default:
      return std::make_unique<HonestAlice>();
  }
}

std::unique_ptr<BobStrategy> make_bob(Scenario s) {
  switch (s) {
    case Scenario::BobMem:
      return std::make_unique<CheatingBob>(CheatingBob::Mode::MinimumError);
    case Scenario::BobUsd:
      return std::make_unique<CheatingBob>(CheatingBob::Mode::UsdUnbounded);
    case Scenario::BobUsdLimited:
      return std::make_unique<CheatingBob>(CheatingBob::Mode::UsdRateLimited, 0.5);
    default:
      return std::make_unique<HonestBob>();
  }
}

struct Tally {
  long long num = 0;
  long long den = 0;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Honest:
      return "honest";
    case Scenario::BobMem:
      return "bob_mem";
    case Scenario::BobUsd:
      return "bob_usd";
    case Scenario::BobUsdLimited:
      return "bob_usd_limited";
    case Scenario::AliceMem:
      return "alice_mem";
    case Scenario::AliceUsd:
      return "alice_usd";
  }
  return "unknown";
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::CheatProbability:
      return "cheat_probability";
    case Metric::DiscardRate:
      return "discard_rate";
    case Metric::VerificationPassRate:
      return "verification_pass_rate";
    case Metric::ReceivedRate:
      return "received_rate";
  }
  return "unknown";
}

std::string variant_name(Variant v) {
  return v == Variant::Original ? "original" : "modified";
}

std::vector<Scenario> parse_scenarios(const std::string& name) {
  if (name == "all")
    return std::vector<Scenario>(std::begin(kAllScenarios), std::end(kAllScenarios));
  for (Scenario s : kAllScenarios)
    if (scenario_name(s) == name) return {s};
  throw ValidationError("unknown scenario: " + name);
}

Variant parse_variant(const std::string& name) {
  if (name == "original") return Variant::Original;
  if (name == "modified") return Variant::Modified;
  throw ValidationError("unknown variant: " + name);
}

std::vector<ResultRow> run_scenario(Scenario scenario, const ExperimentConfig& config,
                                    std::string* first_run_transcript) {
  if (config.runs <= 0) throw ValidationError("run_scenario: runs must be positive");
  Tally cheat, discard, verify, received;
  for (int r = 0; r < config.runs; ++r) {
    const std::unique_ptr<AliceStrategy> alice = make_alice(scenario);
    const std::unique_ptr<BobStrategy> bob = make_bob(scenario);
    ProtocolConfig pc;
    pc.n_slots = config.n_slots;
    pc.test_fraction = config.test_fraction;
    pc.variant = config.variant;
    pc.rng_seed = derive_run_seed(config.seed, static_cast<std::uint64_t>(r));
    const RunResult result = run_protocol(pc, *alice, *bob);
    if (r == 0 && first_run_transcript)
      *first_run_transcript = transcript_to_jsonl(result.transcript);

    verify.num += result.statistics.declaration_passes;
    verify.den += result.statistics.declarations;
    discard.num += result.statistics.phi_stage_discards;
    discard.den += result.statistics.phi_stage_slots;
    for (const OtInstance& inst : result.ot_instances) {
      ++received.den;
      if (inst.bob_received) ++received.num;
    }
    if (bob_cheats(scenario)) {
      // A discard request never risks a wrong guess; count it as a success
      // of the per-slot strategy (correct or withdrawn).
      for (const GuessRecord& g : result.bob_guesses) {
        ++cheat.den;
        if (g.guess == -1 || g.guess == g.truth) ++cheat.num;
      }
    }
    if (alice_cheats(scenario)) {
      for (const GuessRecord& g : result.alice_guesses) {
        ++cheat.den;
        if (g.guess == g.truth) ++cheat.num;
      }
    }
  }

  const AnalyticBounds bounds = analytic_bounds();
  std::vector<ResultRow> rows;
  const auto push = [&](Metric metric, const Tally& t, std::optional<double> analytic) {
    ResultRow row;
    row.scenario = scenario;
    row.variant = config.variant;
    row.metric = metric;
    row.runs = config.runs;
    row.seed = config.seed;
    row.analytic = analytic;
    if (t.den > 0) {
      row.estimate = static_cast<double>(t.num) / static_cast<double>(t.den);
      row.std_error =
          std::sqrt(row.estimate * (1.0 - row.estimate) / static_cast<double>(t.den));
      row.within_tolerance =
          !analytic || std::abs(row.estimate - *analytic) <=
                           std::max(0.01, 4.0 * row.std_error);
    } else {
      row.estimate = std::numeric_limits<double>::quiet_NaN();
      row.std_error = std::numeric_limits<double>::quiet_NaN();
      row.within_tolerance = false;  // error row: no samples observed
    }
    rows.push_back(row);
  };

  std::optional<double> cheat_analytic;
  switch (scenario) {
    case Scenario::Honest:
      break;
    case Scenario::BobMem:
      cheat_analytic = bounds.bob_mem;
      break;
    case Scenario::BobUsd:
      cheat_analytic = bounds.bob_usd;
      break;
    case Scenario::BobUsdLimited:
      cheat_analytic = bounds.bob_rate_limited;
      break;
    case Scenario::AliceMem:
      cheat_analytic = bounds.alice_mem;
      break;
    case Scenario::AliceUsd:
      // Without slot selection every instance falls back to the per-slot
      // guess, capping the strategy at the minimum-error value.
      cheat_analytic = config.variant == Variant::Original ? bounds.alice_usd
                                                           : bounds.alice_mem;
      break;
  }
  double discard_analytic = 1.0 / 3.0;
  if (scenario == Scenario::BobMem) discard_analytic = 0.0;
  if (scenario == Scenario::BobUsd) discard_analytic = 2.0 / 3.0;

  if (scenario != Scenario::Honest) push(Metric::CheatProbability, cheat, cheat_analytic);
  push(Metric::DiscardRate, discard, discard_analytic);
  push(Metric::VerificationPassRate, verify, 1.0);
  if (!bob_cheats(scenario)) push(Metric::ReceivedRate, received, 0.5);
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      std::vector<ScenarioArtifacts>* artifacts) {
  std::vector<Scenario> scenarios = config.scenarios;
  if (scenarios.empty())
    scenarios.assign(std::begin(kAllScenarios), std::end(kAllScenarios));
  const long long cost = static_cast<long long>(config.runs) * config.n_slots *
                         static_cast<long long>(scenarios.size());
  if (cost > config.budget)
    throw ValidationError("experiment exceeds the slot-operation budget (" +
                          std::to_string(cost) + " > " + std::to_string(config.budget) +
                          "); lower --runs/--slots or raise --budget");
  std::vector<ResultRow> rows;
  for (Scenario s : kAllScenarios) {
    if (std::find(scenarios.begin(), scenarios.end(), s) == scenarios.end()) continue;
    std::string transcript;
    std::vector<ResultRow> scenario_rows =
        run_scenario(s, config, artifacts ? &transcript : nullptr);
    rows.insert(rows.end(), scenario_rows.begin(), scenario_rows.end());
    if (artifacts) artifacts->push_back({s, std::move(transcript)});
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out =
      "scenario,variant,metric,estimate,std_error,analytic,within_tolerance,runs,seed\n";
  for (const ResultRow& row : rows) {
    out += scenario_name(row.scenario);
    out += ',';
    out += variant_name(row.variant);
    out += ',';
    out += metric_name(row.metric);
    out += ',';
    out += format_double(row.estimate);
    out += ',';
    out += format_double(row.std_error);
    out += ',';
    if (row.analytic) out += format_double(*row.analytic);
    out += ',';
    out += row.within_tolerance ? "true" : "false";
    out += ',';
    out += std::to_string(row.runs);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

std::string rows_to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRow& row : rows) {
    nlohmann::json j;
    j["scenario"] = scenario_name(row.scenario);
    j["variant"] = variant_name(row.variant);
    j["metric"] = metric_name(row.metric);
    j["estimate"] = row.estimate;
    j["std_error"] = row.std_error;
    if (row.analytic)
      j["analytic"] = *row.analytic;
    else
      j["analytic"] = nullptr;
    j["within_tolerance"] = row.within_tolerance;
    j["runs"] = row.runs;
    j["seed"] = row.seed;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::string emit(const std::vector<ResultRow>& rows, const std::string& format,
                 const std::string& path) {
  if (rows.empty()) throw ValidationError("emit: no rows");
  std::string content;
  if (format == "csv")
    content = rows_to_csv(rows);
  else if (format == "json")
    content = rows_to_json(rows);
  else
    throw ValidationError("emit: unknown format: " + format);
  if (!path.empty()) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("emit: write failed: " + path);
  }
  return content;
}

// --- self check ------------------------------------------------------------

namespace {

double povm_residual(const Povm& povm) {
  const int dim = static_cast<int>(povm.elements.front().rows());
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  double worst = 0.0;
  for (const ComplexMatrix& e : povm.elements) {
    worst = std::max(worst, max_abs_diff(e, e.adjoint()));
    const HermEig eig = herm_eig(e);
    worst = std::max(worst, std::max(0.0, -eig.eigenvalues.back()));
    sum += e;
  }
  worst = std::max(worst, max_abs_diff(sum, ComplexMatrix::Identity(dim, dim)));
  return worst;
}

/// Max deviation of the eigenvalues of m from `expected` (descending), plus
/// eigen-equation residuals for any supplied eigenvector pins.
double eigenstructure_residual(const ComplexMatrix& m, const std::vector<double>& expected,
                               const std::vector<std::pair<double, StateVector>>& pins) {
  const HermEig eig = herm_eig(m);
  double worst = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i)
    worst = std::max(worst, std::abs(eig.eigenvalues[i] - expected[i]));
  for (const auto& [value, vec] : pins)
    worst = std::max(worst, (m * vec - value * vec).norm());
  return worst;
}

StateVector random_state(RngStream& rng, int dim) {
  StateVector v(dim);
  for (int i = 0; i < dim; ++i) {
    // Box-Muller on raw uniforms keeps the draw implementation-independent.
    const double u1 = std::max(rng.uniform(), 1e-300);
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    v(i) = Complex(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
  }
  return v / v.norm();
}

/// Max gap between honest fine-grained joint statistics and the
/// filter+completion realization on `n_states` random 16-dim states.
double two_stage_residual(const HonestMeasurementSpec& spec, Placement where,
                          std::uint64_t seed, int n_states) {
  const TwoStageMeasurement ts = build_two_stage(spec);
  Povm filter;
  filter.elements = {ts.pi_s, ts.pi_f};
  filter.labels = {"s", "f"};
  RngStream rng(seed);
  double worst = 0.0;
  for (int k = 0; k < n_states; ++k) {
    const StateVector psi = random_state(rng, 16);
    // Honest references.
    std::vector<std::vector<double>> honest(spec.branches.size());
    double honest_fail = 0.0;
    for (std::size_t b = 0; b < spec.branches.size(); ++b) {
      const MeasurementBranch& br = spec.branches[b];
      Povm basis_povm;
      for (const StateVector& v : br.basis) {
        basis_povm.elements.push_back(projector(v));
        basis_povm.labels.push_back("o");
      }
      honest[b] = outcome_probabilities(psi, basis_povm, where);
      for (std::size_t i = 0; i < honest[b].size(); ++i) {
        honest[b][i] *= br.choice_probability;
        if (std::find(br.success_indices.begin(), br.success_indices.end(),
                      static_cast<int>(i)) == br.success_indices.end())
          honest_fail += honest[b][i];
      }
    }
    // Delayed realization.
    const double p_success = outcome_probabilities(psi, filter, where)[0];
    worst = std::max(worst, std::abs((1.0 - p_success) - honest_fail));
    if (p_success > 1e-12) {
      const StateVector post = apply_kraus(psi, ts.kraus_s, where).first;
      const std::vector<double> comp = outcome_probabilities(post, ts.completion, where);
      for (std::size_t j = 0; j < comp.size(); ++j) {
        const CompletionOutcome id = ts.outcome_ids[j];
        if (id.branch < 0) continue;  // unreachable complement
        worst = std::max(worst,
                         std::abs(p_success * comp[j] - honest[id.branch][id.outcome]));
      }
    }
  }
  return worst;
}

}  // namespace

SelfCheckReport self_check() {
  SelfCheckReport report;
  const auto add = [&report](const std::string& name, double residual) {
    report.items.push_back({name, residual, residual <= kTol});
  };
  const auto guarded = [&report, &add](const std::string& name, auto&& fn) {
    try {
      add(name, fn());
    } catch (const std::exception&) {
      report.items.push_back({name, std::numeric_limits<double>::infinity(), false});
    }
  };

  guarded("receiver_filter_eigenstructure", [] {
    const ComplexMatrix pi_s = coarse_grain(bob_honest_spec()).first;
    return eigenstructure_residual(pi_s, {1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0},
                                   {{1.0, bell(Bell::PhiPlus)},
                                    {2.0 / 3.0, bell(Bell::PhiMinus)},
                                    {1.0 / 3.0, bell(Bell::PsiPlus)},
                                    {0.0, bell(Bell::PsiMinus)}});
  });
  guarded("sender_filter_eigenstructure", [] {
    const ComplexMatrix pi_s = coarse_grain(alice_honest_spec()).first;
    StateVector kernel(4);
    kernel << 0.5, 0.5, -0.5, 0.5;
    return eigenstructure_residual(pi_s, {1.0, 0.5, 0.5, 0.0}, {{0.0, kernel}});
  });
  guarded("receiver_helstrom_value", [] {
    const auto [r0, r1] = bob_reduced_states();
    return std::abs(helstrom(0.5, r0, 0.5, r1).success_probability -
                    (3.0 + std::sqrt(3.0)) / 6.0);
  });
  guarded("sender_helstrom_value", [] {
    const auto [r0, r1] = alice_reduced_states();
    return std::abs(helstrom(0.5, r0, 0.5, r1).success_probability - 0.75);
  });
  guarded("povm_validity", [] {
    double worst = povm_residual(bob_usd_povm());
    worst = std::max(worst, povm_residual(alice_usd_measurement()));
    const auto [rb0, rb1] = bob_reduced_states();
    worst = std::max(worst, povm_residual(helstrom(0.5, rb0, 0.5, rb1).povm));
    const auto [ra0, ra1] = alice_reduced_states();
    worst = std::max(worst, povm_residual(helstrom(0.5, ra0, 0.5, ra1).povm));
    worst = std::max(worst, povm_residual(build_two_stage(bob_honest_spec()).completion));
    worst = std::max(worst, povm_residual(build_two_stage(alice_honest_spec()).completion));
    return worst;
  });
  guarded("receiver_usd_outcome_table", [] {
    const auto [r0, r1] = bob_reduced_states();
    const Povm usd = bob_usd_povm();
    const std::vector<double> d0 = outcome_distribution(r0, usd);
    const std::vector<double> d1 = outcome_distribution(r1, usd);
    double worst = 0.0;
    const double third = 1.0 / 3.0;
    worst = std::max(worst, std::abs(d0[0] - third));
    worst = std::max(worst, std::abs(d0[1]));
    worst = std::max(worst, std::abs(d0[2] - 2.0 * third));
    worst = std::max(worst, std::abs(d1[0]));
    worst = std::max(worst, std::abs(d1[1] - third));
    worst = std::max(worst, std::abs(d1[2] - 2.0 * third));
    return worst;
  });
  guarded("sender_usd_outcome_table", [] {
    const auto [r0, r1] = alice_reduced_states();
    const Povm usd = alice_usd_measurement();
    const std::vector<double> d0 = outcome_distribution(r0, usd);
    const std::vector<double> d1 = outcome_distribution(r1, usd);
    double worst = 0.0;
    worst = std::max(worst, std::abs(d0[0] - 0.5));  // conclusive rate
    worst = std::max(worst, std::abs(d0[1]));        // conclusive errors
    worst = std::max(worst, std::abs(d0[2] - 0.5));
    worst = std::max(worst, std::abs(d1[0]));
    worst = std::max(worst, std::abs(d1[1] - 0.5));
    worst = std::max(worst, std::abs(d1[2] - 0.5));
    return worst;
  });
  guarded("receiver_two_stage_consistency", [] {
    return two_stage_residual(bob_honest_spec(), Placement::Second, 0xC0FFEEULL, 100);
  });
  guarded("sender_two_stage_consistency", [] {
    return two_stage_residual(alice_honest_spec(), Placement::First, 0xBEEFULL, 100);
  });
  guarded("state_payload_validity", [] {
    double worst = 0.0;
    for (const NamedState& named : named_states()) {
      if (const StateVector* v = std::get_if<StateVector>(&named.payload)) {
        worst = std::max(worst, std::abs(v->norm() - 1.0));
      } else {
        const ComplexMatrix& m = std::get<ComplexMatrix>(named.payload);
        worst = std::max(worst, max_abs_diff(m, m.adjoint()));
        worst = std::max(worst, std::abs(m.trace().real() - 1.0));
        const HermEig eig = herm_eig(m);
        worst = std::max(worst, std::max(0.0, -eig.eigenvalues.back()));
      }
    }
    return worst;
  });
  guarded("analytic_bounds_table", [] {
    const AnalyticBounds b = analytic_bounds();  // throws if drifted
    double worst = std::abs(b.bob_rate_limited - (0.5 + (3.0 + std::sqrt(3.0)) / 12.0));
    worst = std::max(worst, std::abs(b.honest_alice - 0.5));
    worst = std::max(worst, std::abs(b.honest_bob - 0.75));
    worst = std::max(worst, std::abs(b.bob_usd - 1.0));
    worst = std::max(worst, std::abs(b.alice_usd - 1.0));
    return worst;
  });

  report.max_residual = 0.0;
  report.pass = true;
  for (const SelfCheckItem& item : report.items) {
    report.max_residual = std::max(report.max_residual, item.residual);
    report.pass = report.pass && item.pass;
  }
  return report;
}

std::string bounds_to_json() {
  const AnalyticBounds b = analytic_bounds();
  nlohmann::json j;
  j["honest_alice"] = b.honest_alice;
  j["honest_bob"] = b.honest_bob;
  j["bob_mem"] = b.bob_mem;
  j["bob_usd"] = b.bob_usd;
  j["bob_rate_limited"] = b.bob_rate_limited;
  j["alice_mem"] = b.alice_mem;
  j["alice_usd"] = b.alice_usd;
  return j.dump(2) + "\n";
}

}  // namespace rotlab
