// Copyright 2026 The metrospec Authors
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

#include "metrospec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "metrospec/config.hpp"
#include "metrospec/errors.hpp"

namespace metrospec {

namespace {

bool eig_order(const Complex& a, const Complex& b) {
  double ma = std::abs(a);
  double mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

}  // namespace

std::vector<EigPair> eig_general(const CMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeMismatch("eig_general: matrix must be square");
  if (!all_finite(a)) throw DomainViolation("eig_general: non-finite entries");

  const Eigen::Index n = a.rows();
  Eigen::ComplexEigenSolver<CMatrix> right_solver(a, true);
  if (right_solver.info() != Eigen::Success)
    throw NonConvergence("eig_general: eigensolver failed on the input matrix");
  Eigen::ComplexEigenSolver<CMatrix> left_solver(a.adjoint(), true);
  if (left_solver.info() != Eigen::Success)
    throw NonConvergence("eig_general: eigensolver failed on the adjoint");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return eig_order(right_solver.eigenvalues()(i), right_solver.eigenvalues()(j));
  });

  std::vector<EigPair> pairs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pairs[i].value = right_solver.eigenvalues()(order[i]);
    pairs[i].right = right_solver.eigenvectors().col(order[i]).normalized();
  }

  // Match each eigenvalue to the adjoint's conjugate eigenvalue, greedily
  // and without reuse.
  std::vector<bool> used(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = -1;
    double best_dist = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[j]) continue;
      double dist = std::abs(std::conj(left_solver.eigenvalues()(j)) - pairs[i].value);
      if (best < 0 || dist < best_dist) {
        best = static_cast<int>(j);
        best_dist = dist;
      }
    }
    used[best] = true;
    pairs[i].left = left_solver.eigenvectors().col(best).normalized();
  }

  // Flag clusters; biorthogonal scaling is only well defined for simple
  // eigenvalues.
  const double scale = n > 0 ? std::max(1.0, std::abs(pairs[0].value)) : 1.0;
  const double cluster_tol = tolerances().eig_degeneracy * scale;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && std::abs(pairs[i].value - pairs[j].value) <= cluster_tol) {
        pairs[i].degenerate = true;
        break;
      }
    }
  }
  for (auto& pair : pairs) {
    if (pair.degenerate) continue;
    Complex overlap = pair.left.dot(pair.right);
    if (std::abs(overlap) < 1e-12) {
      pair.degenerate = true;  // numerically defective; leave left unscaled
      continue;
    }
    pair.left /= std::conj(overlap);
  }
  return pairs;
}

HermitianEig eig_hermitian(const CMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeMismatch("eig_hermitian: matrix must be square");
  if (!is_hermitian(a, tolerances().density))
    throw NotHermitian("eig_hermitian: input is not Hermitian");

  Eigen::SelfAdjointEigenSolver<CMatrix> solver((a + a.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success) throw NonConvergence("eig_hermitian: solver failed");

  const Eigen::Index n = a.rows();
  HermitianEig out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = CMatrix(n, n);
  for (Eigen::Index i = 0; i < n; ++i) out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  return out;
}

SvdResult svd(const CMatrix& a) {
  if (!all_finite(a)) throw DomainViolation("svd: non-finite entries");
  Eigen::JacobiSVD<CMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.u = solver.matrixU();
  out.singular_values = solver.singularValues();
  out.v = solver.matrixV();
  return out;
}

CMatrix expm_hermitian(const CMatrix& h, Complex scale) {
  HermitianEig eig = eig_hermitian(h);
  const Eigen::Index n = h.rows();
  CVector phases(n);
  for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::exp(scale * eig.values(i));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

CMatrix procrustes(const CMatrix& m1, const CMatrix& m2) {
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols())
    throw ShapeMismatch("procrustes: operand shapes differ");
  Eigen::JacobiSVD<CMatrix> solver(m2 * m1.adjoint(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return solver.matrixV() * solver.matrixU().adjoint();
}

}  // namespace metrospec
