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
//
// Release gate for the simulator: every analytic value, the delayed
// measurement mechanism, the Monte Carlo scenario estimates, the modified
// variant's countermeasures, and determinism are checked end to end. Each
// criterion prints one [PASS]/[FAIL] line; the exit code is the number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rotlab/harness.hpp"

namespace {

using namespace rotlab;

constexpr double kAnalyticTol = 1e-9;
constexpr double kExactTol = 1e-12;
constexpr std::uint64_t kMonteCarloSeed = 20260825;

StateVector random_state(int dim, RngStream& rng) {
  StateVector v(dim);
  double norm2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double u1 = std::max(rng.uniform(), 1e-300);
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    v[i] = Complex(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
    norm2 += std::norm(v[i]);
  }
  for (auto& a : v) a /= std::sqrt(norm2);
  return v;
}

// Largest gap between honest fine-grained statistics and the filter +
// completion realization, over random 16-dim states.
double delayed_consistency_residual(const HonestMeasurementSpec& spec, Placement where,
                                    std::uint64_t seed) {
  const TwoStageMeasurement ts = build_two_stage(spec);
  const Povm filter{{ts.pi_s, ts.pi_f}, {"success", "failure"}};
  RngStream rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const StateVector psi = random_state(16, rng);

    std::map<int, double> honest;  // key branch*4+outcome, successes only
    double honest_failure = 0.0;
    for (std::size_t b = 0; b < spec.branches.size(); ++b) {
      const MeasurementBranch& branch = spec.branches[b];
      Povm basis;
      for (const StateVector& v : branch.basis) {
        basis.elements.push_back(projector(v));
        basis.labels.push_back("o");
      }
      const std::vector<double> probs = outcome_probabilities(psi, basis, where);
      for (int o = 0; o < static_cast<int>(probs.size()); ++o) {
        bool success = false;
        for (int s : branch.success_indices) success |= (s == o);
        if (success)
          honest[static_cast<int>(b) * 4 + o] = branch.choice_probability * probs[o];
        else
          honest_failure += branch.choice_probability * probs[o];
      }
    }

    const double p_s = outcome_probabilities(psi, filter, where)[0];
    std::map<int, double> delayed;
    double complement_weight = 0.0;
    if (p_s > 1e-12) {
      const StateVector post = apply_kraus(psi, ts.kraus_s, where).first;
      const std::vector<double> comp = outcome_probabilities(post, ts.completion, where);
      for (std::size_t j = 0; j < comp.size(); ++j) {
        const CompletionOutcome id = ts.outcome_ids[j];
        if (id.branch < 0)
          complement_weight += p_s * comp[j];
        else
          delayed[id.branch * 4 + id.outcome] = p_s * comp[j];
      }
    }

    for (const auto& [key, value] : honest)
      worst = std::max(worst, std::abs(value - delayed[key]));
    worst = std::max(worst, std::abs(honest_failure - (1.0 - p_s)));
    worst = std::max(worst, complement_weight);
  }
  return worst;
}

struct CheatTally {
  long long declarations = 0;
  long long passes = 0;
  int monitor_aborts = 0;
  int runs = 0;
};

template <typename MakeAlice, typename MakeBob>
CheatTally tally_runs(MakeAlice make_alice, MakeBob make_bob, int runs, int n_slots,
                      std::uint64_t seed, Variant variant) {
  CheatTally tally;
  for (int r = 0; r < runs; ++r) {
    ProtocolConfig config;
    config.n_slots = n_slots;
    config.variant = variant;
    config.rng_seed = derive_run_seed(seed, r);
    auto alice = make_alice();
    auto bob = make_bob();
    const RunResult result = run_protocol(config, *alice, *bob);
    ++tally.runs;
    tally.declarations += result.statistics.declarations;
    tally.passes += result.statistics.declaration_passes;
    if (result.aborted &&
        result.abort_reason.find("discard monitor") != std::string::npos)
      ++tally.monitor_aborts;
  }
  return tally;
}

const ResultRow& find_row(const std::vector<ResultRow>& rows, Scenario s, Metric m) {
  for (const ResultRow& row : rows)
    if (row.scenario == s && row.metric == m) return row;
  throw std::runtime_error("missing result row");
}

bool estimate_close(const std::vector<ResultRow>& rows, Scenario s, Metric m,
                    double analytic, std::string& detail) {
  const ResultRow& row = find_row(rows, s, m);
  const double tol = std::max(0.01, 4.0 * row.std_error);
  if (std::abs(row.estimate - analytic) <= tol) return true;
  std::ostringstream out;
  out << scenario_name(s) << "/" << metric_name(m) << " = " << row.estimate
      << " vs " << analytic << " (tol " << tol << "); ";
  detail += out.str();
  return false;
}

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> check;
};

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Criterion> criteria;

  criteria.push_back({"receiver_helstrom_value", [](std::string& detail) {
    const auto [rho0, rho1] = bob_reduced_states();
    const double got = helstrom(0.5, rho0, 0.5, rho1).success_probability;
    const double want = (3.0 + std::sqrt(3.0)) / 6.0;
    detail = "p = " + std::to_string(got);
    return std::abs(got - want) <= kAnalyticTol;
  }});

  criteria.push_back({"sender_helstrom_value", [](std::string& detail) {
    const auto [rho0, rho1] = alice_reduced_states();
    const double got = helstrom(0.5, rho0, 0.5, rho1).success_probability;
    detail = "p = " + std::to_string(got);
    return std::abs(got - 0.75) <= kAnalyticTol;
  }});

  criteria.push_back({"receiver_usd_outcome_tables", [](std::string& detail) {
    const auto [rho0, rho1] = bob_reduced_states();
    const Povm usd = bob_usd_povm();
    const std::vector<double> row0 = outcome_distribution(rho0, usd);
    const std::vector<double> row1 = outcome_distribution(rho1, usd);
    const double third = 1.0 / 3.0;
    double worst = 0.0;
    const double want0[3] = {third, 0.0, 2.0 * third};
    const double want1[3] = {0.0, third, 2.0 * third};
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, std::abs(row0[i] - want0[i]));
      worst = std::max(worst, std::abs(row1[i] - want1[i]));
    }
    detail = "max deviation " + std::to_string(worst);
    return worst <= kAnalyticTol;
  }});

  criteria.push_back({"sender_usd_conclusive_rates", [](std::string& detail) {
    const auto [rho0, rho1] = alice_reduced_states();
    const Povm usd = alice_usd_measurement();
    const std::vector<double> row0 = outcome_distribution(rho0, usd);
    const std::vector<double> row1 = outcome_distribution(rho1, usd);
    const bool rates = std::abs(row0[0] - 0.5) <= kAnalyticTol &&
                       std::abs(row1[1] - 0.5) <= kAnalyticTol;
    const bool no_errors = row0[1] <= kExactTol && row1[0] <= kExactTol;
    detail = "conclusive (" + std::to_string(row0[0]) + ", " + std::to_string(row1[1]) +
             "), cross (" + std::to_string(row0[1]) + ", " + std::to_string(row1[0]) + ")";
    return rates && no_errors;
  }});

  criteria.push_back({"filter_eigenstructure", [](std::string& detail) {
    const HermEig receiver = herm_eig(coarse_grain(bob_honest_spec()).first);
    const double receiver_want[4] = {1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0};
    const Bell receiver_vectors[4] = {Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus,
                                      Bell::PsiMinus};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(receiver.eigenvalues[i] - receiver_want[i]));
      Complex overlap = 0.0;
      const StateVector want = bell(receiver_vectors[i]);
      for (int k = 0; k < 4; ++k)
        overlap += std::conj(want[k]) * receiver.eigenvectors[i][k];
      worst = std::max(worst, std::abs(std::abs(overlap) - 1.0));
    }
    const HermEig sender = herm_eig(coarse_grain(alice_honest_spec()).first);
    const double sender_want[4] = {1.0, 0.5, 0.5, 0.0};
    for (int i = 0; i < 4; ++i)
      worst = std::max(worst, std::abs(sender.eigenvalues[i] - sender_want[i]));
    StateVector kernel(4);
    kernel << 0.5, 0.5, -0.5, 0.5;
    worst = std::max(worst, std::abs(std::abs(kernel.dot(sender.eigenvectors[3])) - 1.0));
    detail = "max deviation " + std::to_string(worst);
    return worst <= kAnalyticTol;
  }});

  criteria.push_back({"delayed_measurement_consistency", [](std::string& detail) {
    const double receiver =
        delayed_consistency_residual(bob_honest_spec(), Placement::Second, 90001);
    const double sender =
        delayed_consistency_residual(alice_honest_spec(), Placement::First, 90002);

    const auto make_honest_alice = [] { return std::make_unique<HonestAlice>(); };
    const auto make_honest_bob = [] { return std::make_unique<HonestBob>(); };
    const auto make_cheat_bob = [] {
      return std::make_unique<CheatingBob>(CheatingBob::Mode::MinimumError);
    };
    const auto make_cheat_alice = [] {
      return std::make_unique<CheatingAlice>(CheatingAlice::Mode::MinimumError);
    };
    const CheatTally bob_runs =
        tally_runs(make_honest_alice, make_cheat_bob, 150, 2000, 90003, Variant::Original);
    const CheatTally alice_runs =
        tally_runs(make_cheat_alice, make_honest_bob, 150, 2000, 90004, Variant::Original);
    const long long tested = bob_runs.declarations + alice_runs.declarations;
    const long long failures =
        (bob_runs.declarations - bob_runs.passes) + (alice_runs.declarations - alice_runs.passes);
    std::ostringstream out;
    out << "residuals (" << receiver << ", " << sender << "), " << failures
        << " verification failures over " << tested << " tested slots";
    detail = out.str();
    return receiver <= kAnalyticTol && sender <= kAnalyticTol && tested >= 100000 &&
           failures == 0;
  }});

  criteria.push_back({"monte_carlo_estimates", [](std::string& detail) {
    ExperimentConfig config;
    config.scenarios = parse_scenarios("all");
    config.runs = 200;
    config.n_slots = 2000;
    config.seed = kMonteCarloSeed;
    const std::vector<ResultRow> rows = run_experiment(config);
    bool ok = true;
    ok &= estimate_close(rows, Scenario::Honest, Metric::ReceivedRate, 0.5, detail);
    ok &= estimate_close(rows, Scenario::Honest, Metric::DiscardRate, 1.0 / 3.0, detail);
    ok &= estimate_close(rows, Scenario::BobMem, Metric::CheatProbability,
                         (3.0 + std::sqrt(3.0)) / 6.0, detail);
    ok &= estimate_close(rows, Scenario::BobUsd, Metric::CheatProbability, 1.0, detail);
    ok &= estimate_close(rows, Scenario::BobUsd, Metric::DiscardRate, 2.0 / 3.0, detail);
    ok &= estimate_close(rows, Scenario::BobUsdLimited, Metric::CheatProbability,
                         0.5 + (3.0 + std::sqrt(3.0)) / 12.0, detail);
    ok &= estimate_close(rows, Scenario::BobUsdLimited, Metric::DiscardRate, 1.0 / 3.0,
                         detail);
    ok &= estimate_close(rows, Scenario::AliceMem, Metric::CheatProbability, 0.75, detail);
    ok &= estimate_close(rows, Scenario::AliceUsd, Metric::CheatProbability, 1.0, detail);
    if (ok) detail = "all scenario estimates within max(0.01, 4 sigma)";
    return ok;
  }});

  criteria.push_back({"modified_variant_efficacy", [](std::string& detail) {
    ExperimentConfig config;
    config.scenarios = {Scenario::AliceUsd};
    config.variant = Variant::Modified;
    config.runs = 100;
    config.n_slots = 1000;
    config.seed = kMonteCarloSeed + 1;
    const std::vector<ResultRow> rows = run_experiment(config);
    const double sender_rate =
        find_row(rows, Scenario::AliceUsd, Metric::CheatProbability).estimate;

    const auto make_honest_alice = [] { return std::make_unique<HonestAlice>(); };
    const auto make_cheat_bob = [] {
      return std::make_unique<CheatingBob>(CheatingBob::Mode::UsdUnbounded);
    };
    const CheatTally monitor = tally_runs(make_honest_alice, make_cheat_bob, 100, 1000,
                                          kMonteCarloSeed + 2, Variant::Modified);
    std::ostringstream out;
    out << "sender accuracy " << sender_rate << ", monitor aborts " << monitor.monitor_aborts
        << "/" << monitor.runs;
    detail = out.str();
    return sender_rate <= 0.76 && monitor.monitor_aborts >= 99;
  }});

  criteria.push_back({"determinism", [](std::string& detail) {
    ExperimentConfig config;
    config.scenarios = parse_scenarios("all");
    config.runs = 5;
    config.n_slots = 400;
    config.seed = 7;
    std::vector<ScenarioArtifacts> first_artifacts, second_artifacts;
    const std::vector<ResultRow> first = run_experiment(config, &first_artifacts);
    const std::vector<ResultRow> second = run_experiment(config, &second_artifacts);
    const bool results_equal = rows_to_csv(first) == rows_to_csv(second) &&
                               rows_to_json(first) == rows_to_json(second);
    bool transcripts_equal = first_artifacts.size() == second_artifacts.size();
    if (transcripts_equal)
      for (std::size_t i = 0; i < first_artifacts.size(); ++i)
        transcripts_equal &= first_artifacts[i].first_run_transcript ==
                             second_artifacts[i].first_run_transcript;
    detail = std::string("results ") + (results_equal ? "identical" : "DIFFER") +
             ", transcripts " + (transcripts_equal ? "identical" : "DIFFER");
    return results_equal && transcripts_equal;
  }});

  criteria.push_back({"helstrom_optimality_spot_check", [](std::string& detail) {
    const auto [rho0, rho1] = bob_reduced_states();
    const double best = helstrom(0.5, rho0, 0.5, rho1).success_probability;
    RngStream rng(90005);
    double strongest = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      // Random binary projective measurement: eigenbasis of a random
      // Hermitian, split at a random rank.
      ComplexMatrix h(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          const Complex z(rng.uniform() - 0.5, i == j ? 0.0 : rng.uniform() - 0.5);
          h(i, j) = z;
          h(j, i) = std::conj(z);
        }
      const HermEig eig = herm_eig(h);
      const int split = 1 + static_cast<int>(rng.uniform_int(3));
      ComplexMatrix e = ComplexMatrix::Zero(4, 4);
      for (int k = 0; k < split; ++k) e += projector(eig.eigenvectors[k]);
      // success = p0 Tr(E rho0) + p1 Tr((I-E) rho1), or the flipped labels.
      const double success = 0.5 * std::real((e * rho0).trace()) +
                             0.5 * (1.0 - std::real((e * rho1).trace()));
      strongest = std::max(strongest, std::max(success, 1.0 - success));
    }
    std::ostringstream out;
    out << "helstrom " << best << " vs best random strategy " << strongest;
    detail = out.str();
    return best + kAnalyticTol >= strongest;
  }});

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.check(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %-34s %s\n", ok ? "PASS" : "FAIL", criterion.name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  std::printf("%d/%zu criteria passed in %lld ms\n",
              static_cast<int>(criteria.size()) - failures, criteria.size(),
              static_cast<long long>(elapsed));
  return failures;
}
