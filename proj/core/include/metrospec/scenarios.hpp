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

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "metrospec/channels.hpp"
#include "metrospec/qfi.hpp"
#include "metrospec/types.hpp"

namespace metrospec {

/// A worked channel family bundled with its Kraus form and a canonical
/// input state.
struct Scenario {
  std::string name;
  ParamChannel channel;
  std::function<KrausChannel(double)> kraus_at;               // may be empty
  std::function<std::vector<CMatrix>(double)> kraus_dots_at;  // may be empty
  std::function<DensityMatrix(double)> default_input;         // alpha -> rho0
};

using ScalarFn = std::function<double(double)>;

/// Qubit dephasing K1 = sqrt(1-p) e^{-i phi sz/2}, K2 = sqrt(p) sz
/// e^{-i phi sz/2} with p = p_fn(theta), phi = phi_fn(theta). Derivatives
/// dp, dphi may be supplied; otherwise they are finite-differenced
/// scalar-wise. The transition matrix is diagonal with eigenvalues
/// {1, (1-2p)e^{-i phi}, (1-2p)e^{i phi}, 1}.
Scenario dephasing(ScalarFn p_fn, ScalarFn phi_fn, double theta0,
                   std::optional<ScalarFn> dp_fn = {}, std::optional<ScalarFn> dphi_fn = {});

/// Qutrit decay channel with Kraus |2><0|, |2><1|, sqrt(2 theta)|2><2|,
/// sqrt(1/2-theta)|0><2|, sqrt(1/2-theta)|1><2| on theta in [0, 1/2].
Scenario qutrit_decay(double theta0);

struct HeisenbergParams {
  double t = 1.0;
  double p1 = 0.1;
  double p2 = 0.2;
  double p3 = 0.3;
  std::array<double, 4> phi{0.3, 0.7, 1.1, 1.9};
  double theta0 = 0.5;
};

/// Two-qubit Heisenberg-coupling estimation under correlated noise:
/// T_theta = T_noise (U_t(theta) (x) U_t(theta)^*) with
/// U_t = exp(-i t (sz(x)I + I(x)sz + theta H_J)).
Scenario heisenberg_noisy(const HeisenbergParams& params);

/// The explicit 16x16 noise transition matrix.
CMatrix heisenberg_noise_transition(const HeisenbergParams& params);

/// Kraus form of the noise: sqrt(1-p1-p2-p3) W1, sqrt(p1) W2 (sx(x)sx),
/// sqrt(p2) W3 (sx(x)sy), sqrt(p3) W4 (I(x)sz).
KrausChannel heisenberg_noise_kraus(const HeisenbergParams& params);

CMatrix heisenberg_w(double phi);
CMatrix heisenberg_hj();
CMatrix heisenberg_ut(const HeisenbergParams& params, double theta);

/// rho0 = I/4 + alpha U_t(theta0)^dag (sx (x) I) U_t(theta0), 0 < alpha < 1/4.
DensityMatrix heisenberg_input_state(const HeisenbergParams& params, double alpha);

/// The signal eigenmatrix U_t^dag (|01><11| + |10><00|) U_t.
CMatrix heisenberg_r1(const HeisenbergParams& params, double theta);

/// All-W_i-equal robustness experiment: for each second-qubit Bloch vector
/// r the input is U_t^dag [(I/2 + 2 alpha sx) (x) sigma(r)] U_t and the
/// channel is regulated by U_c = U_t(theta0)^dag W^dag. Returns one
/// asymptotic report per Bloch vector.
std::vector<AsymptoticQfiReport> robustness_sweep(const HeisenbergParams& params,
                                                  double common_w_phase, double alpha,
                                                  const std::vector<std::array<double, 3>>& bloch);

}  // namespace metrospec
