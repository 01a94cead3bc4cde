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

#include "rotlab/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace rotlab {

namespace {

constexpr double kClampTol = 1e-12;

/// Applies a dxd operator to one factor of a bipartite pure state without
/// materializing the embedded matrix.
StateVector apply_embedded(const StateVector& state, const ComplexMatrix& k,
                           Placement where) {
  const Eigen::Index n = state.size();
  const Eigen::Index d = k.rows();
  if (k.rows() != k.cols()) throw DimensionError("apply_embedded: operator not square");
  if (where == Placement::Full) {
    if (d != n) throw DimensionError("apply_embedded: size mismatch");
    return k * state;
  }
  if (n % d != 0) throw DimensionError("apply_embedded: incompatible factorization");
  const Eigen::Index rest = n / d;
  // View the state as a d×rest matrix (First) or rest×d matrix (Second).
  StateVector out(n);
  if (where == Placement::First) {
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        m(state.data(), d, rest);
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> o(
        out.data(), d, rest);
    o = k * m;
  } else {
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        m(state.data(), rest, d);
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> o(
        out.data(), rest, d);
    o = m * k.transpose();
  }
  return out;
}

}  // namespace

void validate_povm(const Povm& povm, double tol) {
  if (povm.elements.empty()) throw ValidationError("povm: no elements");
  if (povm.labels.size() != povm.elements.size())
    throw ValidationError("povm: label/element count mismatch");
  const Eigen::Index d = povm.elements.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < povm.elements.size(); ++i) {
    const ComplexMatrix& e = povm.elements[i];
    if (e.rows() != d || e.cols() != d)
      throw DimensionError("povm: element dimension mismatch");
    OperatorReport report = validate_operator(e, tol);
    if (!report.hermitian || !report.psd)
      throw ValidationError("povm: element '" + povm.labels[i] +
                            "' not Hermitian PSD (violation " +
                            std::to_string(report.max_violation) + ")");
    sum += e;
  }
  const double gap = max_abs_diff(sum, ComplexMatrix::Identity(d, d));
  if (gap > tol)
    throw ValidationError("povm: completeness violated by " + std::to_string(gap));
}

std::vector<double> outcome_distribution(const ComplexMatrix& rho, const Povm& povm) {
  std::vector<double> probs;
  probs.reserve(povm.elements.size());
  for (const ComplexMatrix& e : povm.elements) {
    if (e.rows() != rho.rows())
      throw DimensionError("outcome_distribution: dimension mismatch");
    double p = (e * rho).trace().real();
    if (p < 0.0 && p >= -kClampTol) p = 0.0;
    probs.push_back(p);
  }
  return probs;
}

void validate_spec(const HonestMeasurementSpec& spec, double tol) {
  if (spec.branches.empty()) throw ValidationError("measurement spec: no branches");
  double total = 0.0;
  for (const MeasurementBranch& br : spec.branches) {
    if (br.choice_probability < -tol || br.choice_probability > 1.0 + tol)
      throw ValidationError("measurement spec: branch probability out of range");
    total += br.choice_probability;
    if (br.basis.empty()) throw ValidationError("measurement spec: empty basis");
    const Eigen::Index d = br.basis.front().size();
    if (static_cast<Eigen::Index>(br.basis.size()) != d)
      throw ValidationError("measurement spec: basis not complete");
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < br.basis.size(); ++i) {
      for (std::size_t j = 0; j < br.basis.size(); ++j) {
        const Complex ip = br.basis[i].dot(br.basis[j]);
        const double expected = (i == j) ? 1.0 : 0.0;
        if (std::abs(ip - Complex(expected)) > tol)
          throw ValidationError("measurement spec: basis not orthonormal");
      }
      sum += projector(br.basis[i]);
    }
    if (max_abs_diff(sum, ComplexMatrix::Identity(d, d)) > tol)
      throw ValidationError("measurement spec: basis does not resolve identity");
    std::vector<bool> seen(br.basis.size(), false);
    for (int idx : br.success_indices) {
      if (idx < 0 || idx >= static_cast<int>(br.basis.size()) || seen[idx])
        throw ValidationError("measurement spec: bad success index");
      seen[idx] = true;
    }
  }
  if (std::abs(total - 1.0) > tol)
    throw ValidationError("measurement spec: branch probabilities sum to " +
                          std::to_string(total));
}

HonestMeasurementSpec alice_honest_spec() {
  HonestMeasurementSpec spec;
  MeasurementBranch c0;
  c0.choice_probability = 0.5;
  c0.basis = {bell(Bell::PhiPlus), bell(Bell::PhiMinus), bell(Bell::PsiPlus),
              bell(Bell::PsiMinus)};
  c0.success_indices = {1, 2};

  MeasurementBranch c1;
  c1.choice_probability = 0.5;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      c1.basis.push_back(tensor(diagonal_ket(a), computational_ket(b)));
  c1.success_indices = {0, 3};

  spec.branches = {c0, c1};
  return spec;
}

HonestMeasurementSpec bob_honest_spec() {
  HonestMeasurementSpec spec;
  MeasurementBranch d0;
  d0.choice_probability = 2.0 / 3.0;
  for (int i = 0; i < 4; ++i) d0.basis.push_back(basis_ket(4, i));
  d0.success_indices = {0, 3};

  MeasurementBranch d1;
  d1.choice_probability = 1.0 / 3.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      d1.basis.push_back(tensor(diagonal_ket(a), diagonal_ket(b)));
  d1.success_indices = {0, 3};

  spec.branches = {d0, d1};
  return spec;
}

std::pair<ComplexMatrix, ComplexMatrix> coarse_grain(const HonestMeasurementSpec& spec) {
  validate_spec(spec);
  const Eigen::Index d = spec.branches.front().basis.front().size();
  ComplexMatrix pi_s = ComplexMatrix::Zero(d, d);
  for (const MeasurementBranch& br : spec.branches)
    for (int idx : br.success_indices)
      pi_s += br.choice_probability * projector(br.basis[idx]);
  ComplexMatrix pi_f = ComplexMatrix::Identity(d, d) - pi_s;
  return {pi_s, pi_f};
}

TwoStageMeasurement build_two_stage(const HonestMeasurementSpec& spec) {
  TwoStageMeasurement ts;
  auto [pi_s, pi_f] = coarse_grain(spec);
  ts.pi_s = pi_s;
  ts.pi_f = pi_f;
  ts.kraus_s = sqrt_psd(pi_s);
  const ComplexMatrix inv = pinv_psd(ts.kraus_s);

  const Eigen::Index d = pi_s.rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t b = 0; b < spec.branches.size(); ++b) {
    const MeasurementBranch& br = spec.branches[b];
    for (int idx : br.success_indices) {
      ComplexMatrix element =
          inv * (br.choice_probability * projector(br.basis[idx])) * inv;
      element = (element + element.adjoint()) / 2.0;
      sum += element;
      ts.completion.elements.push_back(element);
      ts.completion.labels.push_back("b" + std::to_string(b) + "o" + std::to_string(idx));
      ts.outcome_ids.push_back({static_cast<int>(b), idx});
    }
  }
  // Deficit lives on ker(Πs); unreachable after a successful first stage.
  ComplexMatrix complement = ComplexMatrix::Identity(d, d) - sum;
  complement = (complement + complement.adjoint()) / 2.0;
  ts.completion.elements.push_back(complement);
  ts.completion.labels.push_back("unreachable");
  ts.outcome_ids.push_back({-1, -1});
  validate_povm(ts.completion);

  ts.completion_kraus.reserve(ts.completion.elements.size());
  for (const ComplexMatrix& e : ts.completion.elements)
    ts.completion_kraus.push_back(sqrt_psd(e));
  return ts;
}

std::pair<StateVector, double> apply_kraus(const StateVector& state, const ComplexMatrix& k,
                                           Placement where) {
  StateVector post = apply_embedded(state, k, where);
  const double prob = post.squaredNorm();
  if (prob <= kClampTol)
    throw ImpossibleOutcomeError("apply_kraus: outcome probability " +
                                 std::to_string(prob));
  post /= std::sqrt(prob);
  return {post, prob};
}

std::vector<double> outcome_probabilities(const StateVector& state, const Povm& povm,
                                          Placement where) {
  std::vector<double> probs;
  probs.reserve(povm.elements.size());
  for (const ComplexMatrix& e : povm.elements) {
    const StateVector applied = apply_embedded(state, e, where);
    double p = state.dot(applied).real();
    if (p < 0.0 && p >= -kClampTol) p = 0.0;
    probs.push_back(p);
  }
  return probs;
}

int pick_outcome(const std::vector<double>& probs, RngStream& rng) {
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw ValidationError("pick_outcome: negative probability");
    total += p;
  }
  if (total <= 0.0) throw ValidationError("pick_outcome: zero total probability");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

SampleResult sample(const StateVector& state, const Povm& povm, Placement where,
                    RngStream& rng) {
  const std::vector<double> probs = outcome_probabilities(state, povm, where);
  const int outcome = pick_outcome(probs, rng);
  auto [post, prob] = apply_kraus(state, sqrt_psd(povm.elements[outcome]), where);
  return {outcome, post, prob};
}

DiscriminationResult helstrom(double p0, const ComplexMatrix& rho0, double p1,
                              const ComplexMatrix& rho1) {
  if (p0 < 0.0 || p1 < 0.0 || std::abs(p0 + p1 - 1.0) > kTol)
    throw ValidationError("helstrom: priors must be nonnegative and sum to 1");
  for (const ComplexMatrix* rho : {&rho0, &rho1}) {
    OperatorReport report = validate_operator(*rho);
    if (!report.hermitian || !report.psd || std::abs(rho->trace().real() - 1.0) > kTol)
      throw ValidationError("helstrom: input is not a density matrix");
  }
  const ComplexMatrix delta = p0 * rho0 - p1 * rho1;
  HermEig eig = herm_eig(delta);
  double tn = 0.0;
  const Eigen::Index d = rho0.rows();
  ComplexMatrix guess0 = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i) {
    tn += std::abs(eig.eigenvalues[i]);
    if (eig.eigenvalues[i] > kClampTol) guess0 += projector(eig.eigenvectors[i]);
  }
  DiscriminationResult result;
  result.success_probability = 0.5 * (1.0 + tn);
  result.povm.elements = {guess0, ComplexMatrix::Identity(d, d) - guess0};
  result.povm.labels = {"guess0", "guess1"};
  result.kind = DiscriminationResult::Kind::MinimumError;
  validate_povm(result.povm);
  return result;
}

Povm bob_usd_povm() {
  const double rt3 = std::sqrt(3.0);
  ComplexMatrix p0(3, 3), p1(3, 3), pq(3, 3);
  p0 << 1.0, -rt3, 0.0, -rt3, 3.0, 0.0, 0.0, 0.0, 0.0;
  p0 /= 6.0;
  p1 << 1.0, rt3, 0.0, rt3, 3.0, 0.0, 0.0, 0.0, 0.0;
  p1 /= 6.0;
  pq << 2.0 / 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0;

  Povm povm;
  povm.elements = {embed_bell_span(p0), embed_bell_span(p1),
                   embed_bell_span(pq) + projector(bell(Bell::PsiMinus))};
  povm.labels = {"c0", "c1", "inconclusive"};
  validate_povm(povm);
  return povm;
}

Povm alice_usd_measurement() {
  auto phis = phi_basis();
  const ComplexMatrix p0 = projector(phis[2]);
  const ComplexMatrix p1 = projector(phis[1]);
  Povm povm;
  povm.elements = {p0, p1, ComplexMatrix::Identity(4, 4) - p0 - p1};
  povm.labels = {"d0", "d1", "inconclusive"};
  validate_povm(povm);
  return povm;
}

}  // namespace rotlab
