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

#include "metrospec/channels.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "metrospec/config.hpp"
#include "metrospec/errors.hpp"
#include "metrospec/numerics.hpp"

namespace metrospec {

KrausChannel make_kraus_channel(std::vector<CMatrix> kraus_ops) {
  if (kraus_ops.empty()) throw InvalidChannel("Kraus channel needs at least one operator");
  const Eigen::Index d = kraus_ops.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const CMatrix& k : kraus_ops) {
    if (k.rows() != d || k.cols() != d)
      throw DimensionMismatch("Kraus operators must be square and equally sized");
    if (!all_finite(k)) throw InvalidChannel("Kraus operator has non-finite entries");
    sum += k.adjoint() * k;
  }
  if ((sum - CMatrix::Identity(d, d)).norm() > tolerances().cptp)
    throw InvalidChannel("Kraus completeness sum K^dag K = I violated");
  return KrausChannel{static_cast<int>(d), std::move(kraus_ops)};
}

TransitionMatrix make_transition_matrix(int dim, CMatrix t, bool check_choi) {
  if (dim <= 0 || t.rows() != t.cols() || t.rows() != Eigen::Index(dim) * dim)
    throw DimensionMismatch("transition matrix must be d^2 x d^2");
  if (!all_finite(t)) throw InvalidChannel("transition matrix has non-finite entries");

  CVector id_vec = vectorize(CMatrix::Identity(dim, dim));
  if ((t.adjoint() * id_vec - id_vec).norm() > tolerances().cptp * std::sqrt(double(dim)))
    throw InvalidChannel("transition matrix is not trace preserving");

  TransitionMatrix out{dim, std::move(t)};
  if (check_choi) {
    HermitianEig eig = eig_hermitian((choi_matrix(out) + choi_matrix(out).adjoint()) / 2.0);
    if (eig.values.minCoeff() < tolerances().choi)
      throw InvalidChannel("Choi matrix is not positive semidefinite");
  }
  return out;
}

DensityMatrix make_density_matrix(CMatrix rho) {
  const double tol = tolerances().density;
  if (rho.rows() != rho.cols()) throw DimensionMismatch("density matrix must be square");
  if (!is_hermitian(rho, tol)) throw NotHermitian("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > 10 * tol)
    throw InvalidChannel("density matrix trace is not 1");
  HermitianEig eig = eig_hermitian((rho + rho.adjoint()) / 2.0);
  if (eig.values.minCoeff() < -10 * tol)
    throw InvalidChannel("density matrix has a negative eigenvalue");
  return DensityMatrix{static_cast<int>(rho.rows()), std::move(rho)};
}

CVector vectorize(const CMatrix& a) {
  const Eigen::Index d = a.rows();
  CVector v(d * a.cols());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

CMatrix unvectorize(const CVector& v, int dim) {
  if (v.size() != Eigen::Index(dim) * dim)
    throw DimensionMismatch("unvectorize: length is not dim^2");
  CMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = v(i * dim + j);
  return a;
}

TransitionMatrix kraus_to_transition(const KrausChannel& ch) {
  const int d = ch.dim;
  CMatrix t = CMatrix::Zero(Eigen::Index(d) * d, Eigen::Index(d) * d);
  for (const CMatrix& k : ch.kraus_ops) t += kron(k, k.conjugate());
  return make_transition_matrix(d, std::move(t));
}

DensityMatrix apply_channel(const TransitionMatrix& t, const DensityMatrix& rho) {
  if (t.dim != rho.dim) throw DimensionMismatch("apply_channel: dimensions differ");
  CMatrix out = unvectorize(t.t * vectorize(rho.rho), t.dim);
  // Hermitize to absorb per-application drift.
  out = (out + out.adjoint()) / 2.0;
  return DensityMatrix{t.dim, std::move(out)};
}

TransitionMatrix compose_control(const TransitionMatrix& t, const CMatrix& u) {
  if (u.rows() != t.dim || u.cols() != t.dim)
    throw DimensionMismatch("compose_control: control has wrong shape");
  if (!is_unitary(u, 1e-10)) throw NotUnitary("compose_control: control is not unitary");
  return TransitionMatrix{t.dim, kron(u, u.conjugate()) * t.t};
}

ParamChannel compose_control(const ParamChannel& pc, const CMatrix& u) {
  if (!is_unitary(u, 1e-10)) throw NotUnitary("compose_control: control is not unitary");
  CMatrix lift = kron(u, u.conjugate());
  ParamChannel out = pc;
  out.at = [at = pc.at, lift](double theta) {
    TransitionMatrix t = at(theta);
    return TransitionMatrix{t.dim, lift * t.t};
  };
  if (pc.t_dot) {
    out.t_dot = [t_dot = pc.t_dot, lift](double theta) { return CMatrix(lift * t_dot(theta)); };
  }
  return out;
}

bool unitality_check(const TransitionMatrix& t) {
  CVector id_vec = vectorize(CMatrix::Identity(t.dim, t.dim));
  bool unital = (t.t * id_vec - id_vec).norm() <= tolerances().cptp * std::sqrt(double(t.dim));
  if (unital && operator_norm(t.t) > 1.0 + 1e-9)
    throw InvalidChannel("unital transition matrix with largest singular value above 1");
  return unital;
}

namespace {

void check_domain(const ParamChannel& pc, double theta) {
  if (theta < pc.domain_lo || theta > pc.domain_hi)
    throw DomainViolation("parameter " + std::to_string(theta) +
                          " is outside the channel family domain");
}

}  // namespace

CMatrix derivative(const ParamChannel& pc) {
  check_domain(pc, pc.theta0);
  switch (pc.mode) {
    case DerivativeMode::analytic:
      if (!pc.t_dot) throw DomainViolation("analytic derivative requested but none supplied");
      return pc.t_dot(pc.theta0);
    case DerivativeMode::central_difference: {
      double h = pc.step > 0 ? pc.step : tolerances().fd_central_step;
      check_domain(pc, pc.theta0 + h);
      check_domain(pc, pc.theta0 - h);
      return (pc.at(pc.theta0 + h).t - pc.at(pc.theta0 - h).t) / (2 * h);
    }
    case DerivativeMode::one_sided_difference: {
      double h = pc.step > 0 ? pc.step : tolerances().fd_onesided_step;
      check_domain(pc, pc.theta0 + h);
      return (pc.at(pc.theta0 + h).t - pc.at(pc.theta0).t) / h;
    }
  }
  throw DomainViolation("unknown derivative mode");
}

CMatrix choi_matrix(const TransitionMatrix& t) {
  const int d = t.dim;
  CMatrix j(Eigen::Index(d) * d, Eigen::Index(d) * d);
  for (int a = 0; a < d; ++a)
    for (int m = 0; m < d; ++m)
      for (int b = 0; b < d; ++b)
        for (int n = 0; n < d; ++n) j(a * d + m, b * d + n) = t.t(a * d + b, m * d + n);
  return j;
}

ParamChannel constant_channel(const TransitionMatrix& t, double theta0) {
  ParamChannel pc;
  pc.at = [t](double) { return t; };
  pc.mode = DerivativeMode::analytic;
  const Eigen::Index n = t.t.rows();
  pc.t_dot = [n](double) { return CMatrix(CMatrix::Zero(n, n)); };
  pc.theta0 = theta0;
  return pc;
}

ParamChannel analytic_channel(std::function<TransitionMatrix(double)> at,
                              std::function<CMatrix(double)> t_dot, double theta0,
                              double domain_lo, double domain_hi) {
  ParamChannel pc;
  pc.at = std::move(at);
  pc.mode = DerivativeMode::analytic;
  pc.t_dot = std::move(t_dot);
  pc.theta0 = theta0;
  pc.domain_lo = domain_lo;
  pc.domain_hi = domain_hi;
  return pc;
}

}  // namespace metrospec
