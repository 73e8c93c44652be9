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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "metrospec/channels.hpp"
#include "metrospec/types.hpp"

namespace metrospec {

/// A subspace of C^d held as an ordered orthonormal basis.
struct Subspace {
  CMatrix basis;  // d x k, orthonormal columns
  CMatrix projection() const { return basis * basis.adjoint(); }
  int rank() const { return static_cast<int>(basis.cols()); }
};

/// R1 = r0 + r0^dag, R2 = i(r0 - r0^dag).
std::pair<CMatrix, CMatrix> hermitian_split(const CMatrix& r0);

/// Eigenspaces of a Hermitian matrix, eigenvalues clustered within
/// group_tol (absolute) and ordered descending. The zero-eigenvalue cluster
/// is kept as a subspace of its own.
std::vector<Subspace> spectral_subspaces(const CMatrix& h, double group_tol = -1.0);

/// Iterative principal-angle refinement: splits subspaces until every pair
/// is either orthogonal or has equal rank with degenerate nonzero singular
/// values of the projection product.
std::vector<Subspace> refine_subspaces(std::vector<Subspace> subspaces);

/// Fixes a deterministic basis for every refined subspace and returns the
/// concatenated vectors. Traversal slaves each subspace reachable through
/// non-orthogonality to the first already-fixed neighbor, so only one seed
/// basis per connected component is chosen freely.
std::vector<CVector> canonical_order(const std::vector<Subspace>& subspaces);

struct SynthesisTrace {
  int refine_rounds = 0;
  std::vector<int> subspace_counts;  // per input list, after refinement
  int components = 0;
  int vector_count = 0;
};

struct ControlSolution {
  CMatrix u_c;
  double sanity_residual = 0.0;
  bool succeeded = false;
  SynthesisTrace trace;
};

/// Identifies the interleaving unitary control for the eigenmatrix r0.
/// A clean sanity-check failure (succeeded = false) certifies that no
/// unitary satisfies the equivalence condition.
ControlSolution synthesize_control(const KrausChannel& ch, const CMatrix& r0);

/// Same, driven by the channel action unvec(t vec(R)) so no Kraus
/// representation is needed.
ControlSolution synthesize_control(const TransitionMatrix& t, const CMatrix& r0);

/// True iff t(theta0)|R_i>> = (u_c^dag (x) u_c^T)|R_i>> for both Hermitian
/// parts of r0 and the controlled channel has a peripheral eigenvalue with
/// nonzero derivative at theta0.
bool verify_control(const ParamChannel& pc, const CMatrix& u_c, const CMatrix& r0);

}  // namespace metrospec
