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

#include "metrospec/qfi.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "metrospec/config.hpp"
#include "metrospec/errors.hpp"
#include "metrospec/numerics.hpp"

namespace metrospec {

double qfi_pure(const CVector& psi, const CVector& psi_dot) {
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw NotNormalized("qfi_pure: state vector is not normalized");
  if (psi.size() != psi_dot.size()) throw DimensionMismatch("qfi_pure: size mismatch");
  double dd = psi_dot.squaredNorm();
  Complex pd = psi.dot(psi_dot);
  double value = 4.0 * (dd - std::norm(pd));
  return std::max(value, 0.0);
}

namespace {

struct SldWorkspace {
  RVector p;        // eigenvalues of rho, descending
  CMatrix v;        // eigenvectors
  CMatrix dot_eig;  // rho_dot in the eigenbasis
  int support_dim = 0;
};

SldWorkspace sld_workspace(const DensityMatrix& rho, const CMatrix& rho_dot) {
  const Tolerances& cfg = tolerances();
  if (rho_dot.rows() != rho.dim || rho_dot.cols() != rho.dim)
    throw DimensionMismatch("sld: rho_dot shape mismatch");
  if (!is_hermitian(rho_dot, 1e-8))
    throw NotHermitian("sld: rho_dot is not Hermitian");
  if (std::abs(rho_dot.trace()) > 1e-9 * std::max(1.0, rho_dot.norm()))
    throw DomainViolation("sld: rho_dot is not traceless");

  SldWorkspace ws;
  HermitianEig eig = eig_hermitian(rho.rho);
  ws.p = eig.values;
  ws.v = eig.vectors;
  ws.dot_eig = eig.vectors.adjoint() * rho_dot * eig.vectors;

  double outside = 0.0;
  for (Eigen::Index i = 0; i < ws.p.size(); ++i) {
    if (ws.p(i) > cfg.sld_support) ++ws.support_dim;
    for (Eigen::Index j = 0; j < ws.p.size(); ++j) {
      if (ws.p(i) + ws.p(j) <= cfg.sld_support) outside += std::norm(ws.dot_eig(i, j));
    }
  }
  if (std::sqrt(outside) > cfg.signal_support * std::max(1.0, rho_dot.norm()))
    throw RankDeficientSignal(
        "sld: rho_dot has weight outside the support of rho; the QFI is "
        "discontinuous here (consider perturbing the input state)");
  return ws;
}

}  // namespace

SldResult sld(const DensityMatrix& rho, const CMatrix& rho_dot) {
  const Tolerances& cfg = tolerances();
  SldWorkspace ws = sld_workspace(rho, rho_dot);
  const Eigen::Index n = ws.p.size();
  CMatrix l_eig = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double denom = ws.p(i) + ws.p(j);
      if (denom > cfg.sld_support) l_eig(i, j) = 2.0 * ws.dot_eig(i, j) / denom;
    }
  }
  CMatrix l = ws.v * l_eig * ws.v.adjoint();
  return SldResult{(l + l.adjoint()) / 2.0, ws.support_dim};
}

double qfi_mixed(const DensityMatrix& rho, const CMatrix& rho_dot) {
  const Tolerances& cfg = tolerances();
  SldWorkspace ws = sld_workspace(rho, rho_dot);
  double total = 0.0;
  for (Eigen::Index i = 0; i < ws.p.size(); ++i) {
    for (Eigen::Index j = 0; j < ws.p.size(); ++j) {
      double denom = ws.p(i) + ws.p(j);
      if (denom > cfg.sld_support) total += 2.0 * std::norm(ws.dot_eig(i, j)) / denom;
    }
  }
  return total;
}

double associated_qfi(const DensityMatrix& rho, const CMatrix& rho_dot) {
  double purity = rho.rho.squaredNorm();
  if (purity <= tolerances().purity_min)
    throw DegeneratePurity("associated_qfi: Tr(rho^2) is numerically zero");
  double dd = rho_dot.squaredNorm();
  double rd = (rho.rho.adjoint() * rho_dot).trace().real();
  double value = 4.0 * (dd / purity - (rd / purity) * (rd / purity));
  return std::max(value, 0.0);
}

double qfi_lower_bound(const DensityMatrix& rho, const CMatrix& rho_dot) {
  double purity = rho.rho.squaredNorm();
  double lambda_max = eig_hermitian(rho.rho).values(0);
  return purity / (4.0 * lambda_max) * associated_qfi(rho, rho_dot);
}

namespace {

// Derivatives of the peripheral eigenvectors and expansion coefficients by
// finite differences with nearest-eigenvalue matching and phase alignment.
// Only defined when every peripheral cluster is a singleton.
struct EigvecDerivatives {
  std::vector<CVector> r_dot;
  std::vector<Complex> a_dot;
};

struct MatchedFrame {
  std::vector<CVector> right;
  std::vector<Complex> a;
};

MatchedFrame matched_frame(const ParamChannel& pc, double theta,
                           const PeripheralSpectrum& base, const CVector& rho0_vec) {
  std::vector<EigPair> pairs = eig_general(pc.at(theta).t);
  MatchedFrame frame;
  std::vector<bool> used(pairs.size(), false);
  double h = theta - pc.theta0;
  for (const PeripheralEntry& entry : base.entries) {
    Complex predicted = entry.lambda + h * entry.lambda_dot.value_or(Complex(0, 0));
    int best = -1;
    double best_dist = 0.0;
    for (size_t j = 0; j < pairs.size(); ++j) {
      if (used[j]) continue;
      double dist = std::abs(pairs[j].value - predicted);
      if (best < 0 || dist < best_dist) {
        best = static_cast<int>(j);
        best_dist = dist;
      }
    }
    if (best < 0 || pairs[best].degenerate)
      throw DegenerateUnresolved("eigenvector derivative: no simple matched eigenvalue");
    used[best] = true;
    Complex overlap = entry.right.dot(pairs[best].right);
    if (std::abs(overlap) < 1e-6)
      throw DegenerateUnresolved("eigenvector derivative: matched eigenvector is orthogonal");
    Complex phase = std::conj(overlap) / std::abs(overlap);
    frame.right.push_back(phase * pairs[best].right);
    frame.a.push_back(std::conj(phase) * pairs[best].left.dot(rho0_vec));
  }
  return frame;
}

std::optional<EigvecDerivatives> eigvec_derivatives(const ParamChannel& pc,
                                                    const PeripheralSpectrum& spec,
                                                    const DensityMatrix& rho0) {
  for (const PeripheralEntry& a : spec.entries)
    for (const PeripheralEntry& b : spec.entries)
      if (&a != &b && a.cluster == b.cluster) return std::nullopt;

  const double h = tolerances().fd_eigvec_step;
  const bool central = pc.theta0 - h >= pc.domain_lo && pc.theta0 + h <= pc.domain_hi;
  const bool onesided = pc.theta0 + h <= pc.domain_hi;
  if (!central && !onesided) return std::nullopt;

  CVector rho0_vec = vectorize(rho0.rho);
  try {
    MatchedFrame plus = matched_frame(pc, pc.theta0 + h, spec, rho0_vec);
    MatchedFrame minus;
    double denom = 0.0;
    if (central) {
      minus = matched_frame(pc, pc.theta0 - h, spec, rho0_vec);
      denom = 2.0 * h;
    } else {
      minus.right.reserve(spec.entries.size());
      for (size_t i = 0; i < spec.entries.size(); ++i) {
        minus.right.push_back(spec.entries[i].right);
        minus.a.push_back(spec.entries[i].left.dot(rho0_vec));
      }
      denom = h;
    }
    EigvecDerivatives out;
    for (size_t i = 0; i < spec.entries.size(); ++i) {
      out.r_dot.push_back((plus.right[i] - minus.right[i]) / denom);
      out.a_dot.push_back((plus.a[i] - minus.a[i]) / denom);
    }
    return out;
  } catch (const DegenerateUnresolved&) {
    return std::nullopt;
  }
}

}  // namespace

AsymptoticQfiReport asymptotic_qfi(const ParamChannel& pc, const DensityMatrix& rho0) {
  const Tolerances& cfg = tolerances();
  PeripheralSpectrum spec = peripheral_spectrum(pc);
  StateExpansion exp = expand_state(spec, rho0);
  const int k = static_cast<int>(spec.entries.size());

  AsymptoticQfiReport report;
  report.warnings = spec.warnings;
  for (const PeripheralEntry& entry : spec.entries) report.lambda_dots.push_back(entry.lambda_dot);

  std::vector<Complex> a = exp.coefficients;
  std::vector<Complex> ell(k);
  for (int i = 0; i < k; ++i) {
    if (std::abs(a[i]) > cfg.lambda_dot_nonzero && !spec.entries[i].lambda_dot)
      throw DegenerateUnresolved(
          "asymptotic_qfi: eigenvalue derivative unavailable for a populated "
          "peripheral eigenvector");
    ell[i] = spec.entries[i].lambda_dot.value_or(Complex(0, 0)) / spec.entries[i].lambda;
  }

  CMatrix gram(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gram(i, j) = spec.entries[i].right.dot(spec.entries[j].right);

  CMatrix c(k, k);
  double c_scale = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      c(i, j) = std::conj(a[i]) * a[j] * gram(i, j);
      c_scale = std::max(c_scale, std::abs(c(i, j)));
    }
  }
  if (c_scale < 1e-30)
    throw DegeneratePurity("asymptotic_qfi: the input state has no peripheral component");

  CMatrix phase(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      phase(i, j) = std::conj(spec.entries[i].lambda) * spec.entries[j].lambda;

  // Least common period of the peripheral phase products over contributing
  // pairs.
  int period = 0;
  for (int m = 1; m <= cfg.max_oscillation_period && period == 0; ++m) {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      for (int j = 0; j < k && ok; ++j) {
        if (std::abs(c(i, j)) <= 1e-12 * c_scale) continue;
        if (std::abs(std::pow(phase(i, j), m) - Complex(1.0)) > 1e-9) ok = false;
      }
    }
    if (ok) period = m;
  }
  if (period == 0)
    throw DegenerateUnresolved(
        "asymptotic_qfi: peripheral phase products have no finite period; "
        "per-residue asymptotics are undefined");

  std::optional<EigvecDerivatives> vec_dots = eigvec_derivatives(pc, spec, rho0);

  double best_n2 = 0.0;
  std::optional<double> best_n1;
  for (int r = 0; r < period; ++r) {
    CMatrix phi(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) phi(i, j) = std::pow(phase(i, j), r);

    Complex trace2{0, 0};
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) trace2 += phi(i, j) * c(i, j);
    if (trace2.real() <= 1e-14 || std::abs(trace2.imag()) > 1e-9 * std::abs(trace2))
      throw DegenerateUnresolved("asymptotic_qfi: peripheral purity is not positive");

    AsymptoticClass cls;
    cls.residue = r;
    cls.beta = CMatrix(k, k);
    Complex quad{0, 0};
    Complex z{0, 0};
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        cls.beta(i, j) = phi(i, j) * c(i, j) / trace2;
        quad += cls.beta(i, j) * std::conj(ell[i]) * ell[j];
        z += cls.beta(i, j) * ell[j];
      }
    }
    double n2 = 4.0 * (quad.real() - z.real() * z.real());
    cls.n2 = std::max(n2, 0.0);

    if (vec_dots) {
      // Order-N coefficient: cross terms of the lambda-derivative part of
      // |drho>> with the eigenvector and coefficient derivatives.
      Complex e_sum{0, 0};
      Complex w_sum{0, 0};
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          Complex q_ji = vec_dots->r_dot[i].dot(spec.entries[j].right);  // <<dR_i|R_j>>
          Complex q_ij = spec.entries[i].right.dot(vec_dots->r_dot[j]);  // <<R_i|dR_j>>
          e_sum += phi(i, j) * ell[j] *
                   (std::conj(vec_dots->a_dot[i]) * a[j] * gram(i, j) +
                    std::conj(a[i]) * a[j] * q_ji);
          w_sum += phi(i, j) * (std::conj(a[i]) * vec_dots->a_dot[j] * gram(i, j) +
                                std::conj(a[i]) * a[j] * q_ij);
        }
      }
      cls.n1 = 4.0 * (2.0 * e_sum.real() - 2.0 * z.real() * w_sum.real()) / trace2.real();
    }

    if (cls.n2 >= best_n2) {
      best_n2 = cls.n2;
      best_n1 = cls.n1;
    }
    report.classes.push_back(std::move(cls));
  }

  report.n2_coefficient = best_n2;
  report.n1_coefficient = best_n1;
  report.oscillation_period = period > 1 ? std::optional<int>(period) : std::nullopt;
  report.achieves_hl = best_n2 > cfg.hl_threshold;
  return report;
}

namespace {

SequenceQfi figures_from_state(int dim, const CVector& v, const CVector& w) {
  CMatrix rho_n = unvectorize(v, dim);
  rho_n = (rho_n + rho_n.adjoint()) / 2.0;
  CMatrix rho_dot_n = unvectorize(w, dim);
  rho_dot_n = (rho_dot_n + rho_dot_n.adjoint()) / 2.0;

  // Propagation keeps the state valid up to roundoff drift; bypass the
  // strict factory checks.
  DensityMatrix rho{dim, std::move(rho_n)};

  SequenceQfi out;
  out.qfi = qfi_mixed(rho, rho_dot_n);
  out.associated = associated_qfi(rho, rho_dot_n);
  out.bound = qfi_lower_bound(rho, rho_dot_n);
  return out;
}

}  // namespace

std::vector<SequenceQfi> exact_sequence_qfi_range(const ParamChannel& pc,
                                                  const DensityMatrix& rho0,
                                                  const std::optional<CMatrix>& control,
                                                  long n_min, long n_max) {
  if (n_min < 1) throw DomainViolation("exact_sequence_qfi: n must be at least 1");
  if (n_max < n_min) throw DomainViolation("exact_sequence_qfi: empty range");
  TransitionMatrix t = pc.at(pc.theta0);
  CMatrix step = t.t;
  CMatrix step_dot = derivative(pc);
  if (control) {
    if (!is_unitary(*control, 1e-10))
      throw NotUnitary("exact_sequence_qfi: control is not unitary");
    CMatrix lift = kron(*control, control->conjugate());
    step = lift * step;
    step_dot = lift * step_dot;
  }

  CVector v = vectorize(rho0.rho);
  CVector w = CVector::Zero(v.size());
  std::vector<SequenceQfi> out;
  out.reserve(static_cast<size_t>(n_max - n_min + 1));
  for (long i = 1; i <= n_max; ++i) {
    w = step * w + step_dot * v;
    v = step * v;
    if (i >= n_min) out.push_back(figures_from_state(t.dim, v, w));
  }
  return out;
}

SequenceQfi exact_sequence_qfi(const ParamChannel& pc, const DensityMatrix& rho0,
                               const std::optional<CMatrix>& control, long n) {
  return exact_sequence_qfi_range(pc, rho0, control, n, n).front();
}

}  // namespace metrospec
