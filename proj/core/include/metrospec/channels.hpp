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

#include <functional>
#include <vector>

#include "metrospec/types.hpp"

namespace metrospec {

/// Channel in Kraus form, rho -> sum_i K_i rho K_i^dag.
struct KrausChannel {
  int dim = 0;
  std::vector<CMatrix> kraus_ops;
};

/// Validates completeness sum_i K_i^dag K_i = I before construction.
KrausChannel make_kraus_channel(std::vector<CMatrix> kraus_ops);

/// Liouville transition matrix T = sum_i K_i (x) K_i^*, acting on row-major
/// vectorized states.
struct TransitionMatrix {
  int dim = 0;
  CMatrix t;  // d^2 x d^2
};

/// Validates trace preservation <<I| t = <<I|. With check_choi, also checks
/// complete positivity of the reshuffled Choi matrix (used for untrusted,
/// file-loaded input).
TransitionMatrix make_transition_matrix(int dim, CMatrix t, bool check_choi = false);

struct DensityMatrix {
  int dim = 0;
  CMatrix rho;
};

/// Validates Hermiticity, unit trace, and positive semidefiniteness.
DensityMatrix make_density_matrix(CMatrix rho);

enum class DerivativeMode { analytic, central_difference, one_sided_difference };

/// A one-parameter channel family theta -> T_theta with a derivative rule.
struct ParamChannel {
  std::function<TransitionMatrix(double)> at;
  DerivativeMode mode = DerivativeMode::central_difference;
  std::function<CMatrix(double)> t_dot;  // required in analytic mode
  double step = 0.0;                     // 0 = default for the mode
  double theta0 = 0.0;
  double domain_lo = -1e300;
  double domain_hi = 1e300;
};

/// Row-major vectorization, |rho>> = (rho_11, rho_12, ..., rho_dd)^T, so
/// that <<A|B>> = Tr(A^dag B).
CVector vectorize(const CMatrix& a);
CMatrix unvectorize(const CVector& v, int dim);

TransitionMatrix kraus_to_transition(const KrausChannel& ch);
DensityMatrix apply_channel(const TransitionMatrix& t, const DensityMatrix& rho);

/// Channel followed by the unitary control u: returns (u (x) u^*) t.
TransitionMatrix compose_control(const TransitionMatrix& t, const CMatrix& u);

/// Whole-family version: every T(theta) and its derivative get the control
/// applied after the channel.
ParamChannel compose_control(const ParamChannel& pc, const CMatrix& u);

/// True iff t |I>> = |I>>. When true, the largest singular value of t is
/// additionally asserted to be at most 1 + 1e-9.
bool unitality_check(const TransitionMatrix& t);

/// dT/dtheta at theta0 per the channel's derivative mode.
CMatrix derivative(const ParamChannel& pc);

/// Choi matrix by reshuffling, J[a*d+m, b*d+n] = t[a*d+b, m*d+n].
CMatrix choi_matrix(const TransitionMatrix& t);

/// Convenience: family with a constant transition matrix (and zero
/// derivative) or with an explicit analytic derivative.
ParamChannel constant_channel(const TransitionMatrix& t, double theta0 = 0.0);
ParamChannel analytic_channel(std::function<TransitionMatrix(double)> at,
                              std::function<CMatrix(double)> t_dot, double theta0,
                              double domain_lo = -1e300, double domain_hi = 1e300);

}  // namespace metrospec
