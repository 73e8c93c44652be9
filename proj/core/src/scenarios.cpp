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

#include "metrospec/scenarios.hpp"

#include <cmath>
#include <utility>

#include "metrospec/config.hpp"
#include "metrospec/errors.hpp"
#include "metrospec/numerics.hpp"

namespace metrospec {

namespace {

double scalar_derivative(const ScalarFn& f, double theta) {
  const double h = 1e-6;
  return (f(theta + h) - f(theta - h)) / (2.0 * h);
}

CMatrix ketbra(int d, int i, int j) {
  CMatrix m = CMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

}  // namespace

Scenario dephasing(ScalarFn p_fn, ScalarFn phi_fn, double theta0,
                   std::optional<ScalarFn> dp_fn, std::optional<ScalarFn> dphi_fn) {
  auto p_at = [p_fn](double theta) {
    double p = p_fn(theta);
    if (p < 0.0 || p > 1.0)
      throw DomainViolation("dephasing: p(theta) must stay in [0, 1]");
    return p;
  };
  ScalarFn dp = dp_fn ? *dp_fn : ScalarFn([p_fn](double th) { return scalar_derivative(p_fn, th); });
  ScalarFn dphi =
      dphi_fn ? *dphi_fn : ScalarFn([phi_fn](double th) { return scalar_derivative(phi_fn, th); });

  auto kraus_at = [p_at, phi_fn](double theta) {
    double p = p_at(theta);
    double phi = phi_fn(theta);
    CMatrix rot(2, 2);
    rot << std::exp(Complex(0, -phi / 2)), 0, 0, std::exp(Complex(0, phi / 2));
    return make_kraus_channel({std::sqrt(1.0 - p) * rot, std::sqrt(p) * pauli_z() * rot});
  };

  auto at = [kraus_at](double theta) { return kraus_to_transition(kraus_at(theta)); };

  // dT is assembled in closed form; T is diagonal with entries
  // {1, (1-2p)e^{-i phi}, (1-2p)e^{i phi}, 1}.
  auto t_dot = [p_at, phi_fn, dp, dphi](double theta) {
    double p = p_at(theta);
    double phi = phi_fn(theta);
    double dpv = dp(theta);
    double dphiv = dphi(theta);
    CMatrix out = CMatrix::Zero(4, 4);
    Complex minus = std::exp(Complex(0, -phi));
    out(1, 1) = (-2.0 * dpv - kImag * dphiv * (1.0 - 2.0 * p)) * minus;
    out(2, 2) = std::conj(out(1, 1));
    return out;
  };

  auto kraus_dots_at = [p_at, phi_fn, dp, dphi](double theta) {
    double p = p_at(theta);
    double phi = phi_fn(theta);
    double dpv = dp(theta);
    double dphiv = dphi(theta);
    CMatrix rot(2, 2);
    rot << std::exp(Complex(0, -phi / 2)), 0, 0, std::exp(Complex(0, phi / 2));
    CMatrix rot_dot = -kImag * (dphiv / 2.0) * pauli_z() * rot;
    // d sqrt(p)/dtheta diverges at p = 0 unless p is stationary there; that
    // singularity is intentional and surfaces as IllDefined downstream.
    double d_sqrt_1mp = (dpv == 0.0 && p == 1.0) ? 0.0 : -dpv / (2.0 * std::sqrt(1.0 - p));
    double d_sqrt_p = (dpv == 0.0 && p == 0.0) ? 0.0 : dpv / (2.0 * std::sqrt(p));
    std::vector<CMatrix> dots;
    dots.push_back(d_sqrt_1mp * rot + std::sqrt(1.0 - p) * rot_dot);
    dots.push_back(d_sqrt_p * pauli_z() * rot + std::sqrt(p) * pauli_z() * rot_dot);
    return dots;
  };

  Scenario s;
  s.name = "dephasing";
  s.channel = analytic_channel(at, t_dot, theta0);
  s.kraus_at = kraus_at;
  s.kraus_dots_at = kraus_dots_at;
  s.default_input = [](double alpha) {
    if (alpha <= 0.0 || alpha >= 0.5)
      throw DomainViolation("dephasing input state needs 0 < alpha < 1/2");
    return make_density_matrix(CMatrix::Identity(2, 2) / 2.0 + alpha * pauli_x());
  };
  return s;
}

Scenario qutrit_decay(double theta0) {
  if (theta0 < 0.0 || theta0 > 0.5)
    throw DomainViolation("qutrit_decay: theta0 must lie in [0, 1/2]");

  auto kraus_at = [](double theta) {
    if (theta < 0.0 || theta > 0.5)
      throw DomainViolation("qutrit_decay: theta must lie in [0, 1/2]");
    std::vector<CMatrix> ops;
    ops.push_back(ketbra(3, 2, 0));
    ops.push_back(ketbra(3, 2, 1));
    ops.push_back(std::sqrt(2.0 * theta) * ketbra(3, 2, 2));
    ops.push_back(std::sqrt(0.5 - theta) * ketbra(3, 0, 2));
    ops.push_back(std::sqrt(0.5 - theta) * ketbra(3, 1, 2));
    return make_kraus_channel(std::move(ops));
  };

  auto at = [kraus_at](double theta) { return kraus_to_transition(kraus_at(theta)); };

  // T is affine in theta, so dT is constant.
  CMatrix t_dot_value = 2.0 * kron(ketbra(3, 2, 2), ketbra(3, 2, 2)) -
                        kron(ketbra(3, 0, 2), ketbra(3, 0, 2)) -
                        kron(ketbra(3, 1, 2), ketbra(3, 1, 2));
  auto t_dot = [t_dot_value](double) { return t_dot_value; };

  auto kraus_dots_at = [](double theta) {
    std::vector<CMatrix> dots;
    dots.push_back(CMatrix::Zero(3, 3));
    dots.push_back(CMatrix::Zero(3, 3));
    dots.push_back((1.0 / std::sqrt(2.0 * theta)) * ketbra(3, 2, 2));
    dots.push_back((-0.5 / std::sqrt(0.5 - theta)) * ketbra(3, 0, 2));
    dots.push_back((-0.5 / std::sqrt(0.5 - theta)) * ketbra(3, 1, 2));
    return dots;
  };

  Scenario s;
  s.name = "qutrit-decay";
  s.channel = analytic_channel(at, t_dot, theta0, 0.0, 0.5);
  s.kraus_at = kraus_at;
  s.kraus_dots_at = kraus_dots_at;
  s.default_input = [](double alpha) {
    if (alpha <= -1.0 || alpha >= 1.0)
      throw DomainViolation("qutrit input state needs -1 < alpha < 1");
    CMatrix rho = CMatrix::Zero(3, 3);
    rho(0, 0) = 0.25 + alpha * 0.25;
    rho(1, 1) = 0.25 + alpha * 0.25;
    rho(2, 2) = 0.5 - alpha * 0.5;
    return make_density_matrix(std::move(rho));
  };
  return s;
}

CMatrix heisenberg_w(double phi) {
  CMatrix w = CMatrix::Zero(4, 4);
  w(0, 0) = 1.0;
  w(1, 1) = std::exp(Complex(0, phi));
  w(2, 3) = std::exp(Complex(0, phi));
  w(3, 2) = 1.0;
  return w;
}

CMatrix heisenberg_hj() {
  return kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) + kron(pauli_z(), pauli_z());
}

CMatrix heisenberg_ut(const HeisenbergParams& params, double theta) {
  CMatrix h0 = kron(pauli_z(), identity(2)) + kron(identity(2), pauli_z()) +
               theta * heisenberg_hj();
  return expm_hermitian(h0, Complex(0, -params.t));
}

namespace {

void validate_heisenberg(const HeisenbergParams& params) {
  if (params.p1 < 0 || params.p2 < 0 || params.p3 < 0 ||
      params.p1 + params.p2 + params.p3 > 1.0)
    throw DomainViolation("heisenberg: need p_i >= 0 and p1 + p2 + p3 <= 1");
}

}  // namespace

CMatrix heisenberg_noise_transition(const HeisenbergParams& params) {
  validate_heisenberg(params);
  Complex w1 = 1.0 - params.p1 - params.p2;
  Complex w2 = 1.0 - w1;
  Complex w3 = std::exp(Complex(0, -params.phi[0])) * (1.0 - params.p1 - params.p2 - params.p3) -
               std::exp(Complex(0, -params.phi[3])) * params.p3;
  Complex w4 = std::exp(Complex(0, -params.phi[1])) * params.p1 -
               std::exp(Complex(0, -params.phi[2])) * params.p2;

  CMatrix t = CMatrix::Zero(16, 16);
  auto set = [&t](int row, int col, Complex value) { t(row - 1, col - 1) = value; };
  set(1, 1, w1);
  set(1, 16, w2);
  set(2, 2, w3);
  set(2, 15, w4);
  set(3, 4, w3);
  set(3, 13, w4);
  set(4, 3, w1);
  set(4, 14, w2);
  set(5, 5, std::conj(w3));
  set(5, 12, std::conj(w4));
  set(6, 6, w1);
  set(6, 11, w2);
  set(7, 8, w1);
  set(7, 9, w2);
  set(8, 7, std::conj(w3));
  set(8, 10, std::conj(w4));
  // Row 9 carries w3* in column 13, the partner of row 3 under the
  // Hermiticity-preservation pairing T[(i,j),(k,l)] = conj(T[(j,i),(l,k)]);
  // the Kraus form produces the same entry.
  set(9, 4, std::conj(w4));
  set(9, 13, std::conj(w3));
  set(10, 3, w2);
  set(10, 14, w1);
  set(11, 1, w2);
  set(11, 16, w1);
  set(12, 2, std::conj(w4));
  set(12, 15, std::conj(w3));
  set(13, 8, w2);
  set(13, 9, w1);
  set(14, 7, w4);
  set(14, 10, w3);
  set(15, 5, w4);
  set(15, 12, w3);
  set(16, 6, w2);
  set(16, 11, w1);
  return t;
}

KrausChannel heisenberg_noise_kraus(const HeisenbergParams& params) {
  validate_heisenberg(params);
  double p0 = 1.0 - params.p1 - params.p2 - params.p3;
  std::vector<CMatrix> ops;
  ops.push_back(std::sqrt(p0) * heisenberg_w(params.phi[0]));
  ops.push_back(std::sqrt(params.p1) * heisenberg_w(params.phi[1]) *
                kron(pauli_x(), pauli_x()));
  ops.push_back(std::sqrt(params.p2) * heisenberg_w(params.phi[2]) *
                kron(pauli_x(), pauli_y()));
  ops.push_back(std::sqrt(params.p3) * heisenberg_w(params.phi[3]) *
                kron(identity(2), pauli_z()));
  return make_kraus_channel(std::move(ops));
}

Scenario heisenberg_noisy(const HeisenbergParams& params) {
  validate_heisenberg(params);
  CMatrix noise = heisenberg_noise_transition(params);

  // The Kraus form must reproduce the explicit matrix.
  CMatrix from_kraus = kraus_to_transition(heisenberg_noise_kraus(params)).t;
  if ((from_kraus - noise).norm() > 1e-10)
    throw AlgorithmInvariantViolated(
        "heisenberg: Kraus-built noise disagrees with the explicit matrix");

  CMatrix hj = heisenberg_hj();
  double t_evol = params.t;

  auto at = [params, noise](double theta) {
    CMatrix ut = heisenberg_ut(params, theta);
    return make_transition_matrix(4, noise * kron(ut, ut.conjugate()));
  };
  auto t_dot = [params, noise, hj, t_evol](double theta) {
    CMatrix ut = heisenberg_ut(params, theta);
    CMatrix hj_ut = hj * ut;
    CMatrix deriv = kron(hj_ut, ut.conjugate()) - kron(ut, hj_ut.conjugate());
    return CMatrix(noise * (Complex(0, -t_evol) * deriv));
  };

  Scenario s;
  s.name = "heisenberg";
  s.channel = analytic_channel(at, t_dot, params.theta0);
  s.default_input = [params](double alpha) { return heisenberg_input_state(params, alpha); };
  return s;
}

DensityMatrix heisenberg_input_state(const HeisenbergParams& params, double alpha) {
  if (alpha <= 0.0 || alpha >= 0.25)
    throw DomainViolation("heisenberg input state needs 0 < alpha < 1/4");
  CMatrix ut = heisenberg_ut(params, params.theta0);
  CMatrix rho = CMatrix::Identity(4, 4) / 4.0 +
                alpha * ut.adjoint() * kron(pauli_x(), identity(2)) * ut;
  return make_density_matrix((rho + rho.adjoint()) / 2.0);
}

CMatrix heisenberg_r1(const HeisenbergParams& params, double theta) {
  CMatrix ut = heisenberg_ut(params, theta);
  CMatrix bare = ketbra(4, 1, 3) + ketbra(4, 2, 0);  // |01><11| + |10><00|
  return ut.adjoint() * bare * ut;
}

std::vector<AsymptoticQfiReport> robustness_sweep(const HeisenbergParams& params,
                                                  double common_w_phase, double alpha,
                                                  const std::vector<std::array<double, 3>>& bloch) {
  if (alpha <= 0.0 || alpha >= 0.25)
    throw DomainViolation("robustness_sweep needs 0 < alpha < 1/4");

  HeisenbergParams equal = params;
  equal.phi = {common_w_phase, common_w_phase, common_w_phase, common_w_phase};
  Scenario scenario = heisenberg_noisy(equal);

  CMatrix ut = heisenberg_ut(equal, equal.theta0);
  CMatrix u_c = ut.adjoint() * heisenberg_w(common_w_phase).adjoint();
  ParamChannel regulated = compose_control(scenario.channel, u_c);

  std::vector<AsymptoticQfiReport> reports;
  for (const auto& r : bloch) {
    double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (norm > 1.0 + 1e-12)
      throw DomainViolation("robustness_sweep: Bloch vector norm exceeds 1");
    CMatrix sigma = (identity(2) + r[0] * pauli_x() + r[1] * pauli_y() + r[2] * pauli_z()) / 2.0;
    CMatrix first = identity(2) / 2.0 + 2.0 * alpha * pauli_x();
    CMatrix rho = ut.adjoint() * kron(first, sigma) * ut;
    DensityMatrix rho0 = make_density_matrix((rho + rho.adjoint()) / 2.0);
    reports.push_back(asymptotic_qfi(regulated, rho0));
  }
  return reports;
}

}  // namespace metrospec
