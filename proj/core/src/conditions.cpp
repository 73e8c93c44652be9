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

#include "metrospec/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "metrospec/config.hpp"
#include "metrospec/errors.hpp"
#include "metrospec/numerics.hpp"
#include "metrospec/spectral.hpp"

namespace metrospec {

namespace {

constexpr double kPsdMargin = 1e-6;

double min_eigenvalue(const CMatrix& h) { return eig_hermitian(h).values.minCoeff(); }

// Largest coefficient in (0, cap] keeping base + coeff * direction positive
// semidefinite with margin.
double max_psd_coefficient(const CMatrix& base, const CMatrix& direction, double cap) {
  auto feasible = [&](double x) { return min_eigenvalue(base + x * direction) >= kPsdMargin; };
  if (feasible(cap)) return cap;
  double lo = 0.0;
  double hi = cap;
  for (int iter = 0; iter < 60; ++iter) {
    double mid = (lo + hi) / 2.0;
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

DensityMatrix normalize_state(CMatrix rho) {
  rho = (rho + rho.adjoint()) / 2.0;
  return make_density_matrix(rho / rho.trace().real());
}

// min over phases of ||r - e^{i gamma} r^dag||.
double hermitian_phase_residual(const CMatrix& r) {
  double norm2 = r.squaredNorm();
  double overlap = std::abs((r * r).trace());
  return std::sqrt(std::max(2.0 * norm2 - 2.0 * overlap, 0.0));
}

std::string format_complex(Complex z) {
  return std::to_string(z.real()) + (z.imag() < 0 ? "-" : "+") +
         std::to_string(std::abs(z.imag())) + "i";
}

}  // namespace

HlVerdict check_corollary1(const ParamChannel& pc,
                           const std::optional<DensityMatrix>& rho0_hint) {
  const Tolerances& cfg = tolerances();
  HlVerdict verdict;

  PeripheralSpectrum spec;
  try {
    spec = peripheral_spectrum(pc);
  } catch (const DegenerateUnresolved& e) {
    verdict.status = HlStatus::inconclusive;
    verdict.diagnostics.push_back(std::string("peripheral spectrum unresolved: ") + e.what());
    return verdict;
  }

  const int k = static_cast<int>(spec.entries.size());
  bool orthogonal = true;
  double worst_overlap = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      double overlap = std::abs(spec.entries[i].right.dot(spec.entries[j].right));
      worst_overlap = std::max(worst_overlap, overlap);
      if (overlap > cfg.gram) orthogonal = false;
    }
  }

  int best = -1;
  for (int i = 0; i < k; ++i) {
    const auto& dot = spec.entries[i].lambda_dot;
    if (!dot) continue;
    if (std::abs(*dot) <= cfg.lambda_dot_nonzero) continue;
    if (best < 0 || std::abs(*dot) > std::abs(*spec.entries[best].lambda_dot)) best = i;
  }

  if (!orthogonal) {
    verdict.status = HlStatus::not_detected;
    verdict.diagnostics.push_back(
        "peripheral eigenvectors are not mutually orthogonal (largest overlap " +
        std::to_string(worst_overlap) +
        "); this checker does not apply, but asymptotic_qfi may still show "
        "Heisenberg scaling");
    return verdict;
  }
  if (best < 0) {
    verdict.status = HlStatus::not_detected;
    verdict.diagnostics.push_back("no peripheral eigenvalue has a nonzero derivative");
    return verdict;
  }

  const int d = spec.dim;
  DensityMatrix star = fixed_point(pc.at(pc.theta0));
  CMatrix r_j = unvectorize(spec.entries[best].right, d);
  CMatrix direction = r_j + r_j.adjoint();
  if (direction.norm() < 1e-10) direction = kImag * (r_j - r_j.adjoint());
  const double alpha = 0.5;
  CMatrix base = (1.0 - alpha) * CMatrix::Identity(d, d) / double(d) + alpha * star.rho;
  double beta = max_psd_coefficient(base, direction, 0.25);

  HlWitness witness;
  witness.eigenvalue_index = best;
  witness.lambda = spec.entries[best].lambda;
  witness.lambda_dot = *spec.entries[best].lambda_dot;
  witness.rho0 = rho0_hint ? *rho0_hint : normalize_state(base + beta * direction);

  verdict.status = HlStatus::achievable;
  verdict.witness = std::move(witness);
  verdict.diagnostics.push_back("orthogonal peripheral eigenvectors with lambda_dot = " +
                                format_complex(*spec.entries[best].lambda_dot));
  return verdict;
}

HlVerdict check_corollary2(const ParamChannel& pc) {
  const Tolerances& cfg = tolerances();
  HlVerdict verdict;

  if (!unitality_check(pc.at(pc.theta0))) {
    verdict.status = HlStatus::inconclusive;
    verdict.diagnostics.push_back("NotUnital: this checker only applies to unital channels");
    return verdict;
  }

  PeripheralSpectrum spec;
  try {
    spec = peripheral_spectrum(pc);
  } catch (const DegenerateUnresolved& e) {
    verdict.status = HlStatus::inconclusive;
    verdict.diagnostics.push_back(std::string("peripheral spectrum unresolved: ") + e.what());
    return verdict;
  }

  const int d = spec.dim;
  int best = -1;
  for (int i = 0; i < static_cast<int>(spec.entries.size()); ++i) {
    const auto& dot = spec.entries[i].lambda_dot;
    if (!dot || std::abs(*dot) <= cfg.lambda_dot_nonzero) continue;
    CMatrix r = unvectorize(spec.entries[i].right, d);
    bool hermitian_like = hermitian_phase_residual(r) <= cfg.gram;
    bool null_square = std::abs((r * r).trace()) <= cfg.gram;
    if (!hermitian_like && !null_square) continue;
    if (best < 0 || std::abs(*dot) > std::abs(*spec.entries[best].lambda_dot)) best = i;
  }

  if (best < 0) {
    verdict.status = HlStatus::not_detected;
    verdict.diagnostics.push_back(
        "no peripheral eigenvalue with nonzero derivative and a Hermitian-up-"
        "to-phase or Tr(R^2) = 0 eigenmatrix");
    return verdict;
  }

  CMatrix r_j = unvectorize(spec.entries[best].right, d);
  CMatrix direction = r_j + r_j.adjoint();
  if (direction.norm() < 1e-10) direction = kImag * (r_j - r_j.adjoint());
  CMatrix base = CMatrix::Identity(d, d) / double(d);
  double alpha = max_psd_coefficient(base, direction, 0.25);

  HlWitness witness;
  witness.eigenvalue_index = best;
  witness.lambda = spec.entries[best].lambda;
  witness.lambda_dot = *spec.entries[best].lambda_dot;
  witness.rho0 = normalize_state(base + alpha * direction);

  verdict.status = HlStatus::achievable;
  verdict.witness = std::move(witness);
  verdict.diagnostics.push_back("unital channel with usable lambda_dot = " +
                                format_complex(*spec.entries[best].lambda_dot));
  return verdict;
}

SignalOperator signal_operator(const ParamChannel& pc) {
  const Tolerances& cfg = tolerances();
  TransitionMatrix t = pc.at(pc.theta0);
  CMatrix t_dot = derivative(pc);

  CMatrix gram_op = t.t.adjoint() * t.t;
  HermitianEig eig = eig_hermitian((gram_op + gram_op.adjoint()) / 2.0);

  SignalOperator out;
  const Eigen::Index n = gram_op.rows();
  out.p = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values(i) - 1.0) <= cfg.fixed_point) {
      out.p += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
      ++out.p_rank;
    }
  }
  out.s = out.p * t.t.adjoint() * t_dot * out.p;

  if (out.s.norm() > cfg.signal_rank) {
    for (const EigPair& pair : eig_general(out.s)) {
      if (std::abs(pair.value) <= cfg.signal_rank) continue;
      out.nonzero_eigs.push_back(SignalEig{pair.value, unvectorize(pair.right, t.dim)});
    }
  }
  return out;
}

Theorem2Conditions check_theorem2_conditions(const ParamChannel& pc) {
  const Tolerances& cfg = tolerances();
  Theorem2Conditions out;
  out.unital = unitality_check(pc.at(pc.theta0));
  if (!out.unital) return out;

  SignalOperator so = signal_operator(pc);
  double s_norm = so.s.norm();
  out.signal_nonvanishing = s_norm > cfg.signal_rank;
  out.signal_normal =
      !out.signal_nonvanishing ||
      (so.s * so.s.adjoint() - so.s.adjoint() * so.s).norm() <= cfg.gram * s_norm * s_norm;
  for (const SignalEig& eig : so.nonzero_eigs) out.r0_candidates.push_back(eig.r0);
  return out;
}

HnksResult hnks_check(const KrausChannel& ch, const std::vector<CMatrix>& kraus_dots) {
  if (kraus_dots.size() != ch.kraus_ops.size())
    throw ShapeMismatch("hnks_check: one derivative per Kraus operator required");
  const int d = ch.dim;
  for (const CMatrix& k_dot : kraus_dots) {
    if (k_dot.rows() != d || k_dot.cols() != d)
      throw ShapeMismatch("hnks_check: derivative shape mismatch");
    if (!all_finite(k_dot)) return HnksResult{HnksStatus::ill_defined, std::nullopt, 0.0};
  }

  CMatrix h = CMatrix::Zero(d, d);
  for (size_t i = 0; i < kraus_dots.size(); ++i)
    h += kImag * ch.kraus_ops[i].adjoint() * kraus_dots[i];
  h = (h + h.adjoint()) / 2.0;

  // Real span of the Hermitian parts of {K_i^dag K_j}.
  auto to_real = [d](const CMatrix& m) {
    RVector v(Eigen::Index(d) * d);
    Eigen::Index idx = 0;
    for (int i = 0; i < d; ++i) v(idx++) = m(i, i).real();
    const double root2 = std::sqrt(2.0);
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        v(idx++) = root2 * m(i, j).real();
        v(idx++) = root2 * m(i, j).imag();
      }
    }
    return v;
  };

  std::vector<RVector> span;
  for (const CMatrix& ki : ch.kraus_ops) {
    for (const CMatrix& kj : ch.kraus_ops) {
      CMatrix prod = ki.adjoint() * kj;
      CMatrix herm = (prod + prod.adjoint()) / 2.0;
      CMatrix skew = kImag * (prod - prod.adjoint()) / 2.0;
      if (herm.norm() > 1e-12) span.push_back(to_real(herm));
      if (skew.norm() > 1e-12) span.push_back(to_real(skew));
    }
  }

  HnksResult out;
  out.h = h;
  RVector target = to_real(h);
  if (span.empty()) {
    out.residual = target.norm();
  } else {
    Eigen::MatrixXd basis(target.size(), static_cast<Eigen::Index>(span.size()));
    for (size_t c = 0; c < span.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = span[c];
    Eigen::VectorXd coeffs = basis.colPivHouseholderQr().solve(target);
    out.residual = (basis * coeffs - target).norm();
  }
  out.status = out.residual > tolerances().gram * std::max(1.0, h.norm())
                   ? HnksStatus::not_in_span
                   : HnksStatus::in_span;
  return out;
}

}  // namespace metrospec
