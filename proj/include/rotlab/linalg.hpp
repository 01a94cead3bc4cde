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

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Default numerical tolerance for hermiticity / positivity / normalization
/// checks throughout the library.
inline constexpr double kTol = 1e-9;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : ValidationError {
  using ValidationError::ValidationError;
};
struct NotPsdError : ValidationError {
  using ValidationError::ValidationError;
};
/// Raised when conditioning on an outcome of (Born) probability ~0.
struct ImpossibleOutcomeError : ValidationError {
  using ValidationError::ValidationError;
};
/// Raised when the simulation reaches a state it proves impossible
/// (e.g. a measurement record that no honest execution can produce).
struct EngineFault : std::logic_error {
  using std::logic_error::logic_error;
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending,
/// eigenvectors orthonormal and index-aligned with the eigenvalues.
struct HermEig {
  std::vector<double> eigenvalues;
  std::vector<StateVector> eigenvectors;
};

// Composite indices follow the usual binary convention: subsystem 0 is the
// most significant factor, so a bipartite index is i_0 * dim_1 + i_1.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
StateVector tensor(const StateVector& a, const StateVector& b);

/// Traces out every subsystem not listed in `keep`. `dims` gives the factor
/// dimensions in order; kept subsystems retain their original relative order.
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep);

/// Throws ValidationError if `m` is not Hermitian within `tol`.
HermEig herm_eig(const ComplexMatrix& m, double tol = kTol);

/// Principal square root of a PSD matrix. Eigenvalues in [-tol, 0) are
/// clamped to zero; anything below -tol raises NotPsdError.
ComplexMatrix sqrt_psd(const ComplexMatrix& m, double tol = kTol);

/// Moore-Penrose pseudoinverse of a Hermitian matrix: eigenvalues of
/// magnitude <= tol map to zero, the rest are inverted.
ComplexMatrix pinv_psd(const ComplexMatrix& m, double tol = kTol);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

ComplexMatrix projector(const StateVector& v);

struct OperatorReport {
  bool hermitian = false;
  bool psd = false;
  double max_violation = 0.0;
};
OperatorReport validate_operator(const ComplexMatrix& m, double tol = kTol);

/// Largest entry-wise absolute difference.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace rotlab
