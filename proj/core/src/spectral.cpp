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

#include "metrospec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <Eigen/QR>

#include "metrospec/config.hpp"
#include "metrospec/errors.hpp"
#include "metrospec/numerics.hpp"

namespace metrospec {

namespace {

// Orthonormal basis of the column span, rank-revealing.
CMatrix orthonormal_span(const CMatrix& cols) {
  Eigen::ColPivHouseholderQR<CMatrix> qr(cols);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  CMatrix q = qr.householderQ();
  return q.leftCols(rank);
}

// Gram-Schmidt that keeps the input column order; columns that fall below
// the drop tolerance are skipped.
CMatrix ordered_orthonormalize(const CMatrix& cols, double drop_tol = 1e-8) {
  CMatrix out(cols.rows(), cols.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < cols.cols(); ++c) {
    CVector w = cols.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index k = 0; k < kept; ++k) w -= out.col(k).dot(w) * out.col(k);
    double norm = w.norm();
    if (norm > drop_tol) out.col(kept++) = w / norm;
  }
  return out.leftCols(kept);
}

// Left/right bases of one eigenvalue cluster with L^dag R = I.
struct ClusterBasis {
  CMatrix right;  // d^2 x k, orthonormal columns
  CMatrix left;   // d^2 x k, biorthogonal to right
};

ClusterBasis biorthogonalize(const std::vector<EigPair>& pairs, const std::vector<int>& members) {
  const Eigen::Index n = pairs[members[0]].right.size();
  const Eigen::Index k = static_cast<Eigen::Index>(members.size());
  CMatrix rights(n, k);
  CMatrix lefts(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    rights.col(c) = pairs[members[c]].right;
    lefts.col(c) = pairs[members[c]].left.normalized();
  }
  CMatrix r = orthonormal_span(rights);
  CMatrix l = orthonormal_span(lefts);
  if (r.cols() != k || l.cols() != k)
    throw DegenerateUnresolved("eigenvalue cluster has a rank-deficient eigenspace");
  CMatrix gram = l.adjoint() * r;
  Eigen::FullPivLU<CMatrix> lu(gram);
  if (!lu.isInvertible())
    throw DegenerateUnresolved("left/right eigenspaces of a cluster cannot be paired");
  l = l * lu.inverse().adjoint();
  return ClusterBasis{std::move(r), std::move(l)};
}

bool psd_proportional(const CMatrix& r) {
  double norm2 = r.squaredNorm();
  if (norm2 < 1e-24) return false;
  Complex tr2 = (r * r).trace();
  if (std::abs(std::abs(tr2) - norm2) > tolerances().gram * std::max(1.0, norm2)) return false;
  CMatrix h = std::exp(Complex(0, -std::arg(tr2) / 2)) * r;
  h = (h + h.adjoint()) / 2.0;
  HermitianEig eig = eig_hermitian(h);
  double lo = eig.values.minCoeff();
  double hi = eig.values.maxCoeff();
  double tol = tolerances().gram * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  return lo >= -tol || hi <= tol;
}

// Canonical fixed point within a lambda = 1 cluster: the cluster's spectral
// projection of I/d.
CVector projected_identity(const ClusterBasis& basis, int dim) {
  CVector id_vec = vectorize(CMatrix::Identity(dim, dim) / double(dim));
  return basis.right * (basis.left.adjoint() * id_vec);
}

}  // namespace

PeripheralSpectrum peripheral_spectrum(const ParamChannel& pc, double tol) {
  const Tolerances& cfg = tolerances();
  if (tol < 0) tol = cfg.peripheral;

  TransitionMatrix t = pc.at(pc.theta0);
  CMatrix t_dot = derivative(pc);

  std::vector<EigPair> pairs = eig_general(t.t);

  PeripheralSpectrum out;
  out.dim = t.dim;
  out.tolerance_used = tol;

  std::vector<int> peripheral;
  for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
    double gap = 1.0 - std::abs(pairs[i].value);
    if (gap <= tol) {
      peripheral.push_back(i);
    } else if (gap < cfg.peripheral_warn) {
      out.warnings.push_back("near-peripheral eigenvalue with 1-|lambda| = " +
                             std::to_string(gap) + "; finite-N behaviour may differ");
    }
  }

  // Group the peripheral indices into eigenvalue clusters.
  std::vector<std::vector<int>> clusters;
  std::vector<int> assigned(peripheral.size(), -1);
  for (size_t i = 0; i < peripheral.size(); ++i) {
    if (assigned[i] >= 0) continue;
    std::vector<int> members{peripheral[i]};
    assigned[i] = static_cast<int>(clusters.size());
    for (size_t j = i + 1; j < peripheral.size(); ++j) {
      if (assigned[j] >= 0) continue;
      if (std::abs(pairs[peripheral[i]].value - pairs[peripheral[j]].value) <=
          cfg.eig_degeneracy) {
        members.push_back(peripheral[j]);
        assigned[j] = assigned[i];
      }
    }
    clusters.push_back(std::move(members));
  }

  const double dot_scale = std::max(1.0, t_dot.norm());
  int cluster_id = 0;
  for (const std::vector<int>& members : clusters) {
    const Eigen::Index k = static_cast<Eigen::Index>(members.size());
    Complex lambda{0, 0};
    for (int m : members) lambda += pairs[m].value;
    lambda /= double(k);
    const bool is_unit_cluster = std::abs(lambda - Complex(1.0)) <= cfg.fixed_point;

    ClusterBasis basis = biorthogonalize(pairs, members);
    CMatrix block = basis.left.adjoint() * t_dot * basis.right;

    std::vector<Complex> dots(k, Complex(0, 0));
    if (k == 1) {
      dots[0] = block(0, 0);
    } else if (block.norm() <= 1e-12 * dot_scale) {
      // Derivative block vanishes; all branches are stationary. For the
      // fixed-point cluster, pin the canonical state as the first basis
      // vector and complete the basis by Gram-Schmidt.
      if (is_unit_cluster) {
        CVector state = projected_identity(basis, t.dim);
        CMatrix with_state(basis.right.rows(), k + 1);
        with_state.col(0) = state.normalized();
        with_state.rightCols(k) = basis.right;
        CMatrix reordered = ordered_orthonormalize(with_state);
        if (reordered.cols() != k)
          throw DegenerateUnresolved("fixed-point cluster basis completion failed");
        CMatrix change = basis.left.adjoint() * reordered;
        Eigen::FullPivLU<CMatrix> lu(change);
        if (!lu.isInvertible())
          throw DegenerateUnresolved("fixed-point cluster basis change is singular");
        basis.left = basis.left * lu.inverse().adjoint();
        basis.right = reordered;
      }
    } else {
      // Branch derivatives from block perturbation theory: rotate the
      // cluster basis to diagonalize the restricted derivative block.
      std::vector<EigPair> branch = eig_general(block);
      CMatrix s(k, k);
      for (Eigen::Index c = 0; c < k; ++c) s.col(c) = branch[c].right;
      Eigen::FullPivLU<CMatrix> lu(s);
      if (!lu.isInvertible())
        throw DegenerateUnresolved(
            "degenerate peripheral cluster has a non-diagonalizable derivative block");
      CMatrix rotated = basis.right * s;
      CMatrix inv_adj = lu.inverse().adjoint();
      basis.left = basis.left * inv_adj;
      for (Eigen::Index c = 0; c < k; ++c) {
        double scale = rotated.col(c).norm();
        rotated.col(c) /= scale;
        basis.left.col(c) *= scale;
        dots[c] = branch[c].value;
      }
      basis.right = rotated;
    }

    for (Eigen::Index c = 0; c < k; ++c) {
      PeripheralEntry entry;
      entry.lambda = lambda;
      entry.lambda_dot = dots[c];
      entry.right = basis.right.col(c);
      entry.left = basis.left.col(c);
      entry.cluster = cluster_id;
      entry.is_fixed_point =
          is_unit_cluster && psd_proportional(unvectorize(entry.right, t.dim));
      out.entries.push_back(std::move(entry));
    }
    ++cluster_id;
  }
  return out;
}

Complex eigenvalue_derivative(const ParamChannel& pc, const PeripheralEntry& entry) {
  CMatrix t_dot = derivative(pc);
  Complex numer = entry.left.dot(t_dot * entry.right);
  Complex denom = entry.left.dot(entry.right);
  if (std::abs(denom) < 1e-12)
    throw DegenerateUnresolved("eigenvalue_derivative: left/right overlap vanishes");
  return numer / denom;
}

DensityMatrix fixed_point(const TransitionMatrix& t) {
  const Tolerances& cfg = tolerances();
  std::vector<EigPair> pairs = eig_general(t.t);
  std::vector<int> members;
  for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
    if (std::abs(pairs[i].value - Complex(1.0)) <= std::max(cfg.fixed_point, cfg.eig_degeneracy))
      members.push_back(i);
  }
  if (members.empty()) throw InvalidChannel("fixed_point: no eigenvalue 1 found");

  ClusterBasis basis = biorthogonalize(pairs, members);
  CMatrix rho = unvectorize(projected_identity(basis, t.dim), t.dim);
  rho = (rho + rho.adjoint()) / 2.0;
  double trace = rho.trace().real();
  if (std::abs(trace) < 1e-12) throw InvalidChannel("fixed_point: projected state has no trace");
  return make_density_matrix(rho / trace);
}

StateExpansion expand_state(const PeripheralSpectrum& spec, const DensityMatrix& rho0) {
  if (rho0.dim != spec.dim) throw DimensionMismatch("expand_state: dimensions differ");
  CVector v = vectorize(rho0.rho);
  StateExpansion out;
  out.remainder = v;
  out.coefficients.reserve(spec.entries.size());
  for (const PeripheralEntry& entry : spec.entries) {
    Complex a = entry.left.dot(v);
    out.coefficients.push_back(a);
    out.remainder -= a * entry.right;
  }
  out.residual = out.remainder.norm();
  return out;
}

CVector asymptotic_state(const PeripheralSpectrum& spec, const StateExpansion& exp, long n) {
  if (n < 0) throw DomainViolation("asymptotic_state: n must be nonnegative");
  if (exp.coefficients.size() != spec.entries.size())
    throw DimensionMismatch("asymptotic_state: expansion does not match spectrum");
  CVector out = CVector::Zero(Eigen::Index(spec.dim) * spec.dim);
  for (size_t i = 0; i < spec.entries.size(); ++i) {
    Complex factor = std::pow(spec.entries[i].lambda, double(n));
    out += exp.coefficients[i] * factor * spec.entries[i].right;
  }
  return out;
}

}  // namespace metrospec
