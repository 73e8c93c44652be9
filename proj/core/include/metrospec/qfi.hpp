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
#include "metrospec/spectral.hpp"
#include "metrospec/types.hpp"

namespace metrospec {

/// Pure-state QFI 4(<dpsi|dpsi> - |<psi|dpsi>|^2), clamped at zero.
double qfi_pure(const CVector& psi, const CVector& psi_dot);

struct SldResult {
  CMatrix l;  // Hermitian
  int support_dim = 0;
};

/// Symmetric logarithmic derivative solving 2 rho_dot = rho L + L rho on
/// the support of rho. Throws RankDeficientSignal when rho_dot carries
/// weight outside the support.
SldResult sld(const DensityMatrix& rho, const CMatrix& rho_dot);

/// Exact mixed-state QFI Tr(rho L^2).
double qfi_mixed(const DensityMatrix& rho, const CMatrix& rho_dot);

/// QFI of the associated state |rho>><<rho| / Tr(rho^2):
///   4 { <<drho|drho>>/Tr(rho^2) - [<<rho|drho>>/Tr(rho^2)]^2 }.
double associated_qfi(const DensityMatrix& rho, const CMatrix& rho_dot);

/// Tr(rho^2) / (4 lambda_max(rho)) times the associated QFI; a guaranteed
/// lower bound on the QFI.
double qfi_lower_bound(const DensityMatrix& rho, const CMatrix& rho_dot);

/// Asymptotic coefficients for one residue class of N (N mod period).
struct AsymptoticClass {
  int residue = 0;
  double n2 = 0.0;                  // coefficient of N^2 in the associated QFI
  std::optional<double> n1;         // coefficient of N, when eigenvector
                                    // derivatives are computable
  CMatrix beta;                     // beta_ij over peripheral entries
};

struct AsymptoticQfiReport {
  double n2_coefficient = 0.0;  // max over residue classes
  std::optional<double> n1_coefficient;
  std::vector<AsymptoticClass> classes;
  std::vector<std::optional<Complex>> lambda_dots;
  std::optional<int> oscillation_period;  // empty when the period is 1
  bool achieves_hl = false;
  std::vector<std::string> warnings;
};

/// Asymptotic associated QFI of T^N |rho0>> as N -> infinity, per residue
/// class of N when peripheral phase products make the coefficients
/// N-dependent.
AsymptoticQfiReport asymptotic_qfi(const ParamChannel& pc, const DensityMatrix& rho0);

struct SequenceQfi {
  double qfi = 0.0;
  double associated = 0.0;
  double bound = 0.0;
};

/// Exact finite-N figures after n applications of the (optionally
/// controlled) channel. The output derivative is propagated with the exact
/// product rule sum_k T^{n-1-k} dT T^k |rho0>>.
SequenceQfi exact_sequence_qfi(const ParamChannel& pc, const DensityMatrix& rho0,
                               const std::optional<CMatrix>& control, long n);

/// Incremental version for sweeps: one result per n in [n_min, n_max].
std::vector<SequenceQfi> exact_sequence_qfi_range(const ParamChannel& pc,
                                                  const DensityMatrix& rho0,
                                                  const std::optional<CMatrix>& control,
                                                  long n_min, long n_max);

}  // namespace metrospec
