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

#include "rotlab/states.hpp"

#include <cmath>

namespace rotlab {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}  // namespace

StateVector basis_ket(int dim, int index) {
  if (index < 0 || index >= dim) throw DimensionError("basis_ket: index out of range");
  StateVector v = StateVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

StateVector computational_ket(int x) { return basis_ket(2, x); }

StateVector diagonal_ket(int x) {
  StateVector v(2);
  v(0) = kInvSqrt2;
  v(1) = (x == 0 ? kInvSqrt2 : -kInvSqrt2);
  return v;
}

StateVector bell(Bell label) {
  StateVector v = StateVector::Zero(4);
  switch (label) {
    case Bell::PhiPlus:
      v(0) = kInvSqrt2;
      v(3) = kInvSqrt2;
      break;
    case Bell::PhiMinus:
      v(0) = kInvSqrt2;
      v(3) = -kInvSqrt2;
      break;
    case Bell::PsiPlus:
      v(1) = kInvSqrt2;
      v(2) = kInvSqrt2;
      break;
    case Bell::PsiMinus:
      v(1) = kInvSqrt2;
      v(2) = -kInvSqrt2;
      break;
  }
  return v;
}

StateVector protocol_initial_state() {
  // (|00⟩|00⟩ + |11⟩|01⟩ + |0×0×⟩|10⟩ + |1×1×⟩|11⟩)/2, diag-basis pairs
  // expanded via diagonal_ket.
  const StateVector a00 = tensor(computational_ket(0), computational_ket(0));
  const StateVector a11 = tensor(computational_ket(1), computational_ket(1));
  const StateVector axx0 = tensor(diagonal_ket(0), diagonal_ket(0));
  const StateVector axx1 = tensor(diagonal_ket(1), diagonal_ket(1));
  StateVector psi = 0.5 * (tensor(a00, basis_ket(4, 0)) + tensor(a11, basis_ket(4, 1)) +
                           tensor(axx0, basis_ket(4, 2)) + tensor(axx1, basis_ket(4, 3)));
  return psi;
}

std::pair<StateVector, StateVector> post_alice_states() {
  const double quarter_rt2 = 1.0 / (2.0 * std::sqrt(2.0));
  const StateVector phi_p = bell(Bell::PhiPlus);
  const StateVector phi_m = bell(Bell::PhiMinus);
  const StateVector psi_p = bell(Bell::PsiPlus);
  const StateVector psi_m = bell(Bell::PsiMinus);

  StateVector psi_c0 = quarter_rt2 * (tensor(StateVector(phi_m - psi_p), StateVector(phi_p - psi_p)) +
                                      tensor(StateVector(phi_m + psi_p), StateVector(phi_m - psi_m)));

  const StateVector x0p0 = tensor(diagonal_ket(0), computational_ket(0));
  const StateVector x1p1 = tensor(diagonal_ket(1), computational_ket(1));
  StateVector psi_c1 = quarter_rt2 * (tensor(StateVector(x0p0 - x1p1), StateVector(phi_p + psi_p)) +
                                      tensor(StateVector(x0p0 + x1p1), StateVector(phi_m - psi_m)));
  return {psi_c0, psi_c1};
}

ComplexMatrix embed_bell_span(const ComplexMatrix& m3) {
  if (m3.rows() != 3 || m3.cols() != 3)
    throw DimensionError("embed_bell_span: expected a 3x3 operator");
  const std::array<StateVector, 3> span = {bell(Bell::PhiPlus), bell(Bell::PsiPlus),
                                           bell(Bell::PhiMinus)};
  ComplexMatrix out = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out += m3(i, j) * span[i] * span[j].adjoint();
  return out;
}

std::pair<ComplexMatrix, ComplexMatrix> bob_reduced_states() {
  const double r13 = std::sqrt(1.0 / 3.0);
  const double r23 = std::sqrt(2.0 / 3.0);
  // Coordinates over {Φ⁺, Ψ⁺, Φ⁻}.
  auto vec3 = [](double a, double b, double c) {
    StateVector v(3);
    v << Complex(a), Complex(b), Complex(c);
    return v;
  };
  const StateVector x0 = vec3(1.0, -r13, r23);
  const StateVector y0 = vec3(-1.0, r13, r23);
  const StateVector x1 = vec3(1.0, r13, r23);
  const StateVector y1 = vec3(1.0, r13, -r23);
  const ComplexMatrix rho0_3 = 0.25 * (x0 * x0.adjoint() + y0 * y0.adjoint());
  const ComplexMatrix rho1_3 = 0.25 * (x1 * x1.adjoint() + y1 * y1.adjoint());
  return {embed_bell_span(rho0_3), embed_bell_span(rho1_3)};
}

std::pair<ComplexMatrix, ComplexMatrix> alice_reduced_states() {
  const double quarter_rt2 = 1.0 / (2.0 * std::sqrt(2.0));
  const double rt2 = std::sqrt(2.0);
  auto vec4 = [](double a, double b, double c, double d) {
    StateVector v(4);
    v << Complex(a), Complex(b), Complex(c), Complex(d);
    return v;
  };
  const StateVector psi00 = quarter_rt2 * vec4(1.0 + rt2, 1.0 - rt2, 1.0, -1.0);
  const StateVector psi11 = quarter_rt2 * vec4(1.0 - rt2, 1.0 + rt2, 1.0, -1.0);
  const StateVector psi0x = 0.5 * vec4(1.0, -1.0, 1.0, 1.0);
  const StateVector psi1x = 0.5 * vec4(1.0, -1.0, -1.0, -1.0);
  ComplexMatrix rho_a0 = 0.5 * (psi00 * psi00.adjoint() + psi11 * psi11.adjoint());
  ComplexMatrix rho_a1 = 0.5 * (psi0x * psi0x.adjoint() + psi1x * psi1x.adjoint());
  return {rho_a0, rho_a1};
}

std::array<StateVector, 3> phi_basis() {
  StateVector phi0(4), phi1(4), phi2(4);
  phi0 << Complex(kInvSqrt2), Complex(-kInvSqrt2), Complex(0.0), Complex(0.0);
  phi1 << Complex(0.0), Complex(0.0), Complex(kInvSqrt2), Complex(kInvSqrt2);
  phi2 << Complex(0.5), Complex(0.5), Complex(0.5), Complex(-0.5);
  return {phi0, phi1, phi2};
}

std::vector<NamedState> named_states() {
  std::vector<NamedState> all;
  all.push_back({"psi", protocol_initial_state()});
  auto [c0, c1] = post_alice_states();
  all.push_back({"psi_c0", c0});
  all.push_back({"psi_c1", c1});
  auto [rb0, rb1] = bob_reduced_states();
  all.push_back({"rhoB0", rb0});
  all.push_back({"rhoB1", rb1});
  auto [ra0, ra1] = alice_reduced_states();
  all.push_back({"rhoA0", ra0});
  all.push_back({"rhoA1", ra1});
  auto phis = phi_basis();
  all.push_back({"phi0", phis[0]});
  all.push_back({"phi1", phis[1]});
  all.push_back({"phi2", phis[2]});
  all.push_back({"bell_phi_plus", bell(Bell::PhiPlus)});
  all.push_back({"bell_phi_minus", bell(Bell::PhiMinus)});
  all.push_back({"bell_psi_plus", bell(Bell::PsiPlus)});
  all.push_back({"bell_psi_minus", bell(Bell::PsiMinus)});
  return all;
}

}  // namespace rotlab
