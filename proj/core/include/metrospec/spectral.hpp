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

#include <optional>
#include <string>
#include <vector>

#include "metrospec/channels.hpp"
#include "metrospec/types.hpp"

namespace metrospec {

struct PeripheralEntry {
  Complex lambda;
  std::optional<Complex> lambda_dot;
  CVector right;  // unit norm
  CVector left;   // left^dag right = 1
  bool is_fixed_point = false;
  int cluster = 0;  // entries sharing an eigenvalue cluster share this id
};

struct PeripheralSpectrum {
  std::vector<PeripheralEntry> entries;
  double tolerance_used = 0.0;
  int dim = 0;
  std::vector<std::string> warnings;
};

/// All eigenvalues of T(theta0) with |lambda| >= 1 - tol, with matched
/// left/right eigenvectors and first-order eigenvalue derivatives. Within a
/// degenerate cluster the basis is rotated to diagonalize the restricted
/// derivative block L^dag dT R, so each entry carries its own branch
/// derivative. For the lambda = 1 cluster with a vanishing block, the first
/// basis vector is the canonical fixed point.
PeripheralSpectrum peripheral_spectrum(const ParamChannel& pc, double tol = -1.0);

/// First-order perturbation formula (left^dag dT right) / (left^dag right)
/// for a simple peripheral eigenvalue.
Complex eigenvalue_derivative(const ParamChannel& pc, const PeripheralEntry& entry);

/// The fixed point state: image of I/d under the spectral projection onto
/// the lambda = 1 eigenspace, renormalized. Deterministic also when the
/// eigenspace is degenerate.
DensityMatrix fixed_point(const TransitionMatrix& t);

struct StateExpansion {
  std::vector<Complex> coefficients;  // a_i = left_i^dag |rho0>>
  CVector remainder;                  // |rho0>> - sum a_i |R_i>>
  double residual = 0.0;
};

StateExpansion expand_state(const PeripheralSpectrum& spec, const DensityMatrix& rho0);

/// Peripheral-only propagation sum_i a_i lambda_i^n |R_i>>.
CVector asymptotic_state(const PeripheralSpectrum& spec, const StateExpansion& exp, long n);

}  // namespace metrospec
