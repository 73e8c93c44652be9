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

#include <vector>

#include "metrospec/types.hpp"

namespace metrospec {

/// One eigenvalue of a general complex matrix. `right` has unit norm.
/// For eigenvalues that are simple (no other eigenvalue within the relative
/// cluster tolerance), `left` is scaled so that left^dag * right = 1 and
/// `degenerate` is false. Clustered eigenvalues are flagged degenerate and
/// carry the matched unit-norm left vector without biorthogonal scaling.
struct EigPair {
  Complex value;
  CVector right;
  CVector left;
  bool degenerate = false;
};

/// Full eigendecomposition of a square complex matrix. Results are sorted
/// by descending |value|, ties broken by descending real part, then
/// descending imaginary part. Left vectors come from the eigendecomposition
/// of the adjoint, matched by conjugate eigenvalue.
std::vector<EigPair> eig_general(const CMatrix& a);

struct HermitianEig {
  RVector values;   // descending
  CMatrix vectors;  // unitary, columns match values
};

/// Eigendecomposition of a Hermitian matrix. Throws NotHermitian when the
/// input fails ||a - a^dag|| <= density * max(1, ||a||).
HermitianEig eig_hermitian(const CMatrix& a);

struct SvdResult {
  CMatrix u;
  RVector singular_values;  // non-increasing
  CMatrix v;
};

SvdResult svd(const CMatrix& a);

/// V diag(exp(scale * w)) V^dag for Hermitian h = V diag(w) V^dag.
CMatrix expm_hermitian(const CMatrix& h, Complex scale);

/// Unitary solution of the Procrustes alignment: returns u_c = V' U'^dag
/// where U' D' V'^dag is the SVD of m2 m1^dag. u_c minimizes
/// ||u^dag m1 - m2|| over unitaries.
CMatrix procrustes(const CMatrix& m1, const CMatrix& m2);

}  // namespace metrospec
