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

#include "rotlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rotlab {

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  if (m.rows() != m.cols()) throw DimensionError("partial_trace: matrix not square");
  long total = 1;
  for (int d : dims) {
    if (d <= 0) throw DimensionError("partial_trace: nonpositive factor dimension");
    total *= d;
  }
  if (total != m.rows())
    throw DimensionError("partial_trace: factor dimensions do not multiply to matrix size");

  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw DimensionError("partial_trace: subsystem index out of range");
    kept[k] = true;
  }

  std::vector<int> keep_dims, trace_dims, keep_pos, trace_pos;
  for (int i = 0; i < n; ++i) {
    (kept[i] ? keep_dims : trace_dims).push_back(dims[i]);
    (kept[i] ? keep_pos : trace_pos).push_back(i);
  }
  const long dk = std::accumulate(keep_dims.begin(), keep_dims.end(), 1L,
                                  std::multiplies<long>());
  const long dt = std::accumulate(trace_dims.begin(), trace_dims.end(), 1L,
                                  std::multiplies<long>());

  // Strides of each subsystem inside the full composite index.
  std::vector<long> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  auto expand = [](long flat, const std::vector<int>& fdims,
                   const std::vector<int>& pos, const std::vector<long>& stride) {
    long full = 0;
    for (int i = static_cast<int>(fdims.size()) - 1; i >= 0; --i) {
      full += (flat % fdims[i]) * stride[pos[i]];
      flat /= fdims[i];
    }
    return full;
  };

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (long t = 0; t < dt; ++t) {
    const long toff = expand(t, trace_dims, trace_pos, stride);
    for (long r = 0; r < dk; ++r) {
      const long roff = expand(r, keep_dims, keep_pos, stride) + toff;
      for (long c = 0; c < dk; ++c)
        out(r, c) += m(roff, expand(c, keep_dims, keep_pos, stride) + toff);
    }
  }
  return out;
}

HermEig herm_eig(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("herm_eig: matrix not square");
  const double herm_gap = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_gap > tol)
    throw ValidationError("herm_eig: matrix not Hermitian (gap " +
                          std::to_string(herm_gap) + ")");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw ValidationError("herm_eig: eigensolver failed to converge");

  HermEig result;
  const Eigen::Index d = m.rows();
  result.eigenvalues.resize(d);
  result.eigenvectors.resize(d);
  // Eigen sorts ascending; we expose descending.
  for (Eigen::Index i = 0; i < d; ++i) {
    result.eigenvalues[i] = solver.eigenvalues()(d - 1 - i);
    result.eigenvectors[i] = solver.eigenvectors().col(d - 1 - i);
  }
  return result;
}

ComplexMatrix sqrt_psd(const ComplexMatrix& m, double tol) {
  HermEig eig = herm_eig(m, tol);
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i) {
    double lambda = eig.eigenvalues[i];
    if (lambda < -tol)
      throw NotPsdError("sqrt_psd: eigenvalue " + std::to_string(lambda) +
                        " below -tolerance");
    if (lambda < 0.0) lambda = 0.0;
    if (lambda > 0.0)
      out += std::sqrt(lambda) * projector(eig.eigenvectors[i]);
  }
  return out;
}

ComplexMatrix pinv_psd(const ComplexMatrix& m, double tol) {
  HermEig eig = herm_eig(m, tol);
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i) {
    const double lambda = eig.eigenvalues[i];
    if (std::abs(lambda) > tol)
      out += (1.0 / lambda) * projector(eig.eigenvectors[i]);
  }
  return out;
}

double trace_norm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

ComplexMatrix projector(const StateVector& v) { return v * v.adjoint(); }

OperatorReport validate_operator(const ComplexMatrix& m, double tol) {
  OperatorReport report;
  if (m.rows() != m.cols()) {
    report.max_violation = std::numeric_limits<double>::infinity();
    return report;
  }
  const double herm_gap = (m - m.adjoint()).cwiseAbs().maxCoeff();
  report.hermitian = herm_gap <= tol;
  report.max_violation = herm_gap;
  if (report.hermitian) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((m + m.adjoint()) / 2.0);
    const double min_eig = solver.eigenvalues().minCoeff();
    report.psd = min_eig >= -tol;
    report.max_violation = std::max(herm_gap, std::max(0.0, -min_eig));
  }
  return report;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("max_abs_diff: shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace rotlab
