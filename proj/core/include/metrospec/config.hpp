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

namespace metrospec {

/// Numerical tolerances used across the library. Every value can be
/// overridden at process start through METROSPEC_* environment variables
/// (see load_tolerances_from_env).
struct Tolerances {
  // Eigenvalues with 1 - |lambda| <= peripheral are treated as peripheral.
  double peripheral = 1e-9;
  // Near-peripheral warning band: 1 - |lambda| < peripheral_warn.
  double peripheral_warn = 1e-4;
  // Relative threshold below which eigenvalues form one cluster.
  double eig_degeneracy = 1e-8;
  // Absolute grouping tolerance for Hermitian spectra and singular values.
  double spectral_group = 1e-8;
  // |lambda - 1| threshold for fixed-point eigenvalues.
  double fixed_point = 1e-9;
  // p_i + p_j at or below this is outside the support of rho for the SLD.
  double sld_support = 1e-10;
  // Weight of rho_dot outside supp(rho) that triggers RankDeficientSignal.
  double signal_support = 1e-7;
  // Minimum purity Tr(rho^2) for the associated QFI.
  double purity_min = 1e-12;
  // |mu| threshold for nonzero signal-operator eigenvalues.
  double signal_rank = 1e-9;
  // N^2 coefficient above this counts as Heisenberg scaling.
  double hl_threshold = 1e-10;
  // Derivatives with |lambda_dot| above this count as nonzero.
  double lambda_dot_nonzero = 1e-10;
  // Gram-matrix off-diagonal tolerance for orthogonality checks.
  double gram = 1e-8;
  // Singular values below this are zero in the subspace refinement.
  double singular_zero = 1e-9;
  // |s - 1| below this counts as a unity singular value.
  double singular_unity = 1e-9;
  // Relative residual for the control sanity check.
  double sanity = 1e-8;
  // Trace-preservation / completeness tolerance for channels.
  double cptp = 1e-10;
  // Most negative admissible Choi eigenvalue.
  double choi = -1e-9;
  // Hermiticity / density-matrix validation tolerance.
  double density = 1e-10;
  // Subspace refinement iteration cap.
  int refine_max_rounds = 64;
  // Longest oscillation period searched for peripheral phase products.
  int max_oscillation_period = 360;
  // Default finite-difference steps.
  double fd_central_step = 1e-6;
  double fd_onesided_step = 1e-7;
  // Step for eigenvector derivatives (N-order asymptotic term).
  double fd_eigvec_step = 1e-5;
};

/// Process-wide tolerance configuration. Set once at startup; treated as
/// read-only afterwards so concurrent readers are safe.
Tolerances& tolerances();

/// Applies METROSPEC_<NAME> environment overrides, e.g.
/// METROSPEC_PERIPHERAL=1e-8 or METROSPEC_SANITY=1e-6.
void load_tolerances_from_env();

}  // namespace metrospec
