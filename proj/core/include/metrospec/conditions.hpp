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

enum class HlStatus { achievable, not_detected, inconclusive };

struct HlWitness {
  int eigenvalue_index = 0;
  Complex lambda;
  Complex lambda_dot;
  DensityMatrix rho0;  // constructive input state achieving the scaling
};

/// Verdict of a sufficient-condition checker. Achievable always carries a
/// witness with a nonzero peripheral eigenvalue derivative. The checkers
/// detect, they do not rule out: NotDetected is not impossibility.
struct HlVerdict {
  HlStatus status = HlStatus::not_detected;
  std::optional<HlWitness> witness;
  std::vector<std::string> diagnostics;
};

/// Heisenberg scaling via mutually orthogonal peripheral eigenvectors and a
/// nonzero peripheral eigenvalue derivative. When rho0_hint is given it
/// replaces the constructed witness state.
HlVerdict check_corollary1(const ParamChannel& pc,
                           const std::optional<DensityMatrix>& rho0_hint = {});

/// Unital-channel variant: needs one peripheral eigenvalue with nonzero
/// derivative whose eigenmatrix is Hermitian up to a phase or satisfies
/// Tr(R^2) = 0.
HlVerdict check_corollary2(const ParamChannel& pc);

struct SignalEig {
  Complex mu;
  CMatrix r0;  // d x d eigenmatrix
};

/// The projected signal operator s = P T^dag dT P, with P the projection on
/// the eigenvalue-1 eigenspace of T^dag T.
struct SignalOperator {
  CMatrix p;  // d^2 x d^2 Hermitian projection
  CMatrix s;  // d^2 x d^2
  std::vector<SignalEig> nonzero_eigs;
  int p_rank = 0;
};

SignalOperator signal_operator(const ParamChannel& pc);

struct Theorem2Conditions {
  bool unital = false;
  bool signal_nonvanishing = false;
  bool signal_normal = false;
  std::vector<CMatrix> r0_candidates;  // eigenmatrices paired with adjoints
};

/// Conditions for control-assisted Heisenberg scaling of a unital channel.
/// For non-unital input only `unital` is meaningful.
Theorem2Conditions check_theorem2_conditions(const ParamChannel& pc);

enum class HnksStatus { in_span, not_in_span, ill_defined };

struct HnksResult {
  HnksStatus status = HnksStatus::ill_defined;
  std::optional<CMatrix> h;  // i sum_i K_i^dag dK_i
  double residual = 0.0;     // distance of h from the Hermitian Kraus span
};

/// Hamiltonian-not-in-Kraus-span diagnostic. IllDefined when any Kraus
/// derivative has non-finite entries (singular parametrizations).
HnksResult hnks_check(const KrausChannel& ch, const std::vector<CMatrix>& kraus_dots);

}  // namespace metrospec
