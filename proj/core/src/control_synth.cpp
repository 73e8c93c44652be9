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

#include "metrospec/control_synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "metrospec/config.hpp"
#include "metrospec/errors.hpp"
#include "metrospec/numerics.hpp"
#include "metrospec/spectral.hpp"

namespace metrospec {

namespace {

double max_singular_value(const CMatrix& g) {
  Eigen::JacobiSVD<CMatrix> solver(g);
  return solver.singularValues().size() > 0 ? solver.singularValues()(0) : 0.0;
}

bool projections_equal(const Subspace& a, const Subspace& b, double tol) {
  if (a.rank() != b.rank()) return false;
  return (a.projection() - b.projection()).norm() <= tol;
}

// Pairs are conformal when they are orthogonal or share the rank with all
// principal angles degenerate (no zero singular values hiding pi/2 angles).
bool conformal_pair(const Subspace& a, const Subspace& b) {
  const Tolerances& cfg = tolerances();
  CMatrix g = a.basis.adjoint() * b.basis;
  if (max_singular_value(g) <= cfg.singular_zero) return true;
  if (a.rank() != b.rank()) return false;
  Eigen::JacobiSVD<CMatrix> solver(g);
  const RVector& s = solver.singularValues();
  if (s.size() < a.rank()) return false;
  return s(s.size() - 1) > cfg.singular_zero && s(0) - s(s.size() - 1) <= cfg.spectral_group;
}

// Split one ordered pair along its principal angles. Left pieces partition
// S_x by distinct nonzero singular values (ascending) plus the orthogonal
// complement; right pieces take the nonzero, nonunity values plus the
// complement in S_y.
std::vector<Subspace> split_pair(const Subspace& sx, const Subspace& sy) {
  const Tolerances& cfg = tolerances();
  CMatrix g = sx.basis.adjoint() * sy.basis;
  Eigen::JacobiSVD<CMatrix> solver(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CMatrix left = sx.basis * solver.matrixU();    // spans S_x
  CMatrix right = sy.basis * solver.matrixV();   // spans S_y
  const Eigen::Index ns = solver.singularValues().size();
  auto sigma = [&](Eigen::Index i) { return i < ns ? solver.singularValues()(i) : 0.0; };

  // Group indices with equal singular values, ascending.
  std::vector<std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = left.cols() - 1; i >= 0; --i) {
    if (sigma(i) <= cfg.singular_zero) continue;
    if (groups.empty() || sigma(groups.back().back()) - sigma(i) > cfg.spectral_group)
      groups.push_back({i});
    else
      groups.back().push_back(i);
  }

  std::vector<Subspace> pieces;
  auto add_columns = [&](const CMatrix& source, const std::vector<Eigen::Index>& cols) {
    if (cols.empty()) return;
    CMatrix basis(source.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = source.col(cols[c]);
    pieces.push_back(Subspace{std::move(basis)});
  };

  for (const auto& group : groups) add_columns(left, group);
  std::vector<Eigen::Index> x_complement;
  for (Eigen::Index i = 0; i < left.cols(); ++i)
    if (sigma(i) <= cfg.singular_zero) x_complement.push_back(i);
  add_columns(left, x_complement);

  for (const auto& group : groups) {
    if (std::abs(sigma(group.front()) - 1.0) <= cfg.singular_unity) continue;
    add_columns(right, group);
  }
  std::vector<Eigen::Index> y_complement;
  for (Eigen::Index i = 0; i < right.cols(); ++i) {
    double s = sigma(i);
    if (s <= cfg.singular_zero || std::abs(s - 1.0) <= cfg.singular_unity)
      y_complement.push_back(i);
  }
  add_columns(right, y_complement);
  return pieces;
}

void deduplicate(std::vector<Subspace>& subspaces) {
  std::vector<Subspace> kept;
  for (Subspace& s : subspaces) {
    bool duplicate = false;
    for (const Subspace& k : kept) {
      if (projections_equal(s, k, 1e-9)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(std::move(s));
  }
  subspaces = std::move(kept);
}

std::vector<Subspace> refine_impl(std::vector<Subspace> subspaces, int* rounds_out) {
  const Tolerances& cfg = tolerances();
  int round = 0;
  for (; round < cfg.refine_max_rounds; ++round) {
    bool stable = true;
    for (size_t i = 0; i < subspaces.size() && stable; ++i)
      for (size_t j = i + 1; j < subspaces.size() && stable; ++j)
        if (!conformal_pair(subspaces[i], subspaces[j])) stable = false;
    if (stable) {
      if (rounds_out) *rounds_out = round;
      return subspaces;
    }

    std::vector<Subspace> next;
    if (subspaces.size() == 1) next = subspaces;
    for (size_t i = 0; i < subspaces.size(); ++i) {
      for (size_t j = 0; j < subspaces.size(); ++j) {
        if (i == j) continue;
        if (conformal_pair(subspaces[i], subspaces[j])) {
          next.push_back(subspaces[i]);
          next.push_back(subspaces[j]);
        } else {
          std::vector<Subspace> pieces = split_pair(subspaces[i], subspaces[j]);
          next.insert(next.end(), pieces.begin(), pieces.end());
        }
      }
    }
    deduplicate(next);
    subspaces = std::move(next);
  }
  throw NoConvergence("refine_subspaces: subspace structure did not stabilize within " +
                      std::to_string(cfg.refine_max_rounds) + " rounds");
}

// Deterministic seed basis: orthonormalized projections of the coordinate
// axes, taken in index order.
CMatrix seed_basis(const Subspace& s) {
  const Eigen::Index d = s.basis.rows();
  const Eigen::Index k = s.basis.cols();
  CMatrix out(d, k);
  Eigen::Index kept = 0;
  for (Eigen::Index axis = 0; axis < d && kept < k; ++axis) {
    CVector w = s.basis * s.basis.adjoint().col(axis);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < kept; ++c) w -= out.col(c).dot(w) * out.col(c);
    double norm = w.norm();
    if (norm > 1e-8) out.col(kept++) = w / norm;
  }
  if (kept != k)
    throw AlgorithmInvariantViolated("canonical_order: seed basis construction fell short");
  return out;
}

std::vector<CVector> canonical_order_impl(const std::vector<Subspace>& subspaces,
                                          int* components_out) {
  const Tolerances& cfg = tolerances();
  std::vector<CMatrix> canonical(subspaces.size());
  std::vector<bool> fixed(subspaces.size(), false);
  std::vector<int> order;
  std::deque<size_t> queue;
  int components = 0;

  for (size_t start = 0; start < subspaces.size(); ++start) {
    if (fixed[start]) continue;
    canonical[start] = seed_basis(subspaces[start]);
    fixed[start] = true;
    order.push_back(static_cast<int>(start));
    queue.push_back(start);
    ++components;

    // Slave every subspace reachable through non-orthogonality to the
    // first fixed neighbor, so the whole component hangs off one seed.
    while (!queue.empty()) {
      size_t p = queue.front();
      queue.pop_front();
      for (size_t q = 0; q < subspaces.size(); ++q) {
        if (fixed[q]) continue;
        CMatrix g = canonical[p].adjoint() * subspaces[q].basis;
        double smax = max_singular_value(g);
        if (smax <= cfg.singular_zero) continue;
        if (subspaces[q].rank() != subspaces[p].rank())
          throw AlgorithmInvariantViolated(
              "canonical_order: non-orthogonal subspaces with different ranks");
        Eigen::JacobiSVD<CMatrix> solver(g);
        const RVector& s = solver.singularValues();
        if (s(s.size() - 1) <= cfg.singular_zero ||
            s(0) - s(s.size() - 1) > 10 * cfg.spectral_group)
          throw AlgorithmInvariantViolated(
              "canonical_order: principal angles are not degenerate");
        double common = s.mean();
        CMatrix v = subspaces[q].basis * (subspaces[q].basis.adjoint() * canonical[p]) / common;
        if ((v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols())).norm() > 1e-6)
          throw AlgorithmInvariantViolated("canonical_order: slaved basis lost orthonormality");
        canonical[q] = std::move(v);
        fixed[q] = true;
        order.push_back(static_cast<int>(q));
        queue.push_back(q);
      }
    }
  }

  std::vector<CVector> vectors;
  for (int idx : order)
    for (Eigen::Index c = 0; c < canonical[idx].cols(); ++c)
      vectors.push_back(canonical[idx].col(c));
  if (components_out) *components_out = components;
  return vectors;
}

CMatrix channel_action(const TransitionMatrix& t, const CMatrix& r) {
  CMatrix out = unvectorize(t.t * vectorize(r), t.dim);
  return (out + out.adjoint()) / 2.0;
}

ControlSolution synthesize_impl(const std::function<CMatrix(const CMatrix&)>& action,
                                Eigen::Index dim, const CMatrix& r0) {
  if (r0.rows() != dim || r0.cols() != dim)
    throw ShapeMismatch("synthesize_control: r0 has the wrong shape");

  auto [r1, r2] = hermitian_split(r0);
  std::vector<CMatrix> list_in{r1, r2};
  std::vector<CMatrix> list_out;
  for (const CMatrix& r : list_in) {
    CMatrix mapped = action(r);
    list_out.push_back((mapped + mapped.adjoint()) / 2.0);
  }

  ControlSolution solution;
  std::vector<std::vector<CVector>> vectors(2);
  for (int side = 0; side < 2; ++side) {
    const std::vector<CMatrix>& list = side == 0 ? list_in : list_out;
    std::vector<Subspace> subspaces;
    for (const CMatrix& r : list) {
      std::vector<Subspace> parts = spectral_subspaces(r);
      subspaces.insert(subspaces.end(), parts.begin(), parts.end());
    }
    int rounds = 0;
    subspaces = refine_impl(std::move(subspaces), &rounds);
    solution.trace.refine_rounds = std::max(solution.trace.refine_rounds, rounds);
    solution.trace.subspace_counts.push_back(static_cast<int>(subspaces.size()));
    int components = 0;
    vectors[side] = canonical_order_impl(subspaces, &components);
    solution.trace.components = std::max(solution.trace.components, components);
  }

  if (vectors[0].size() != vectors[1].size())
    throw AlgorithmInvariantViolated(
        "synthesize_control: spectral structure differs between the input "
        "and output lists");
  solution.trace.vector_count = static_cast<int>(vectors[0].size());

  CMatrix m1(dim, static_cast<Eigen::Index>(vectors[0].size()));
  CMatrix m2(dim, static_cast<Eigen::Index>(vectors[1].size()));
  for (size_t c = 0; c < vectors[0].size(); ++c) {
    m1.col(static_cast<Eigen::Index>(c)) = vectors[0][c];
    m2.col(static_cast<Eigen::Index>(c)) = vectors[1][c];
  }

  CMatrix u = procrustes(m1, m2);

  // Normalize the global phase: largest-modulus entry real positive.
  Eigen::Index bi = 0, bj = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      if (std::abs(u(i, j)) > best) {
        best = std::abs(u(i, j));
        bi = i;
        bj = j;
      }
    }
  }
  u *= std::conj(u(bi, bj)) / std::abs(u(bi, bj));

  double residual = 0.0;
  for (size_t i = 0; i < list_in.size(); ++i) {
    double num = (u.adjoint() * list_in[i] * u - list_out[i]).norm();
    residual = std::max(residual, num / std::max(1.0, list_in[i].norm()));
  }

  solution.u_c = std::move(u);
  solution.sanity_residual = residual;
  solution.succeeded = residual <= tolerances().sanity;
  return solution;
}

}  // namespace

std::pair<CMatrix, CMatrix> hermitian_split(const CMatrix& r0) {
  if (r0.rows() != r0.cols()) throw ShapeMismatch("hermitian_split: matrix must be square");
  return {r0 + r0.adjoint(), kImag * (r0 - r0.adjoint())};
}

std::vector<Subspace> spectral_subspaces(const CMatrix& h, double group_tol) {
  if (group_tol < 0) group_tol = tolerances().spectral_group;
  HermitianEig eig = eig_hermitian(h);
  std::vector<Subspace> out;
  Eigen::Index start = 0;
  while (start < eig.values.size()) {
    Eigen::Index stop = start + 1;
    while (stop < eig.values.size() && eig.values(stop - 1) - eig.values(stop) <= group_tol)
      ++stop;
    out.push_back(Subspace{eig.vectors.middleCols(start, stop - start)});
    start = stop;
  }
  return out;
}

std::vector<Subspace> refine_subspaces(std::vector<Subspace> subspaces) {
  return refine_impl(std::move(subspaces), nullptr);
}

std::vector<CVector> canonical_order(const std::vector<Subspace>& subspaces) {
  return canonical_order_impl(subspaces, nullptr);
}

ControlSolution synthesize_control(const KrausChannel& ch, const CMatrix& r0) {
  auto action = [&ch](const CMatrix& r) {
    CMatrix out = CMatrix::Zero(r.rows(), r.cols());
    for (const CMatrix& k : ch.kraus_ops) out += k * r * k.adjoint();
    return out;
  };
  return synthesize_impl(action, ch.dim, r0);
}

ControlSolution synthesize_control(const TransitionMatrix& t, const CMatrix& r0) {
  auto action = [&t](const CMatrix& r) { return channel_action(t, r); };
  return synthesize_impl(action, t.dim, r0);
}

bool verify_control(const ParamChannel& pc, const CMatrix& u_c, const CMatrix& r0) {
  const Tolerances& cfg = tolerances();
  TransitionMatrix t = pc.at(pc.theta0);
  if (u_c.rows() != t.dim || u_c.cols() != t.dim)
    throw ShapeMismatch("verify_control: control has the wrong shape");

  auto [r1, r2] = hermitian_split(r0);
  CMatrix lift = kron(u_c.adjoint(), u_c.transpose());
  for (const CMatrix& r : {r1, r2}) {
    if (r.norm() < 1e-14) continue;
    CVector v = vectorize(r).normalized();
    if ((t.t * v - lift * v).norm() > cfg.sanity) return false;
  }

  try {
    ParamChannel regulated = compose_control(pc, u_c);
    PeripheralSpectrum spec = peripheral_spectrum(regulated);
    for (const PeripheralEntry& entry : spec.entries) {
      if (entry.lambda_dot && std::abs(*entry.lambda_dot) > cfg.lambda_dot_nonzero) return true;
    }
  } catch (const DegenerateUnresolved&) {
    return false;
  }
  return false;
}

}  // namespace metrospec
