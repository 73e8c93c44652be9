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

#include <doctest.h>

#include <cstring>
#include <random>

#include "metrospec/conditions.hpp"
#include "metrospec/control_synth.hpp"
#include "metrospec/errors.hpp"
#include "metrospec/qfi.hpp"
#include "metrospec/scenarios.hpp"
#include "test_helpers.hpp"

using namespace metrospec;

namespace {

CMatrix cnot() {
  CMatrix u = CMatrix::Zero(4, 4);
  u(0, 0) = 1;
  u(1, 1) = 1;
  u(2, 3) = 1;
  u(3, 2) = 1;
  return u;
}

double distance_up_to_phase(const CMatrix& a, const CMatrix& b) {
  Complex overlap = (a.adjoint() * b).trace();
  if (std::abs(overlap) < 1e-14) return (a - b).norm();
  return (a * (overlap / std::abs(overlap)) - b).norm();
}

}  // namespace

TEST_CASE("hermitian_split") {
  std::mt19937 rng(127);
  CMatrix h = test::random_hermitian(rng, 3);
  auto [r1, r2] = hermitian_split(h);
  CHECK((r1 - 2.0 * h).norm() < 1e-14);
  CHECK(r2.norm() < 1e-14);

  CMatrix flip(2, 2);  // |0><1|
  flip << 0, 1, 0, 0;
  auto [x, y] = hermitian_split(flip);
  CHECK((x - pauli_x()).norm() < 1e-14);
  CHECK((y - pauli_y()).norm() < 1e-14);

  auto [zx, zy] = hermitian_split(CMatrix::Zero(2, 2));
  CHECK(zx.norm() == 0.0);
  CHECK(zy.norm() == 0.0);
}

TEST_CASE("spectral_subspaces") {
  auto z = spectral_subspaces(pauli_z());
  REQUIRE(z.size() == 2);
  CHECK(z[0].rank() == 1);
  CHECK(z[1].rank() == 1);
  CHECK(std::abs(std::abs(z[0].basis(0, 0)) - 1.0) < 1e-12);  // +1 first

  auto doubled = spectral_subspaces(kron(pauli_x(), CMatrix::Identity(2, 2)));
  REQUIRE(doubled.size() == 2);
  CHECK(doubled[0].rank() == 2);
  CHECK(doubled[1].rank() == 2);

  auto zero = spectral_subspaces(CMatrix::Zero(3, 3));
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].rank() == 3);
}

TEST_CASE("refine_subspaces leaves conformal configurations alone") {
  // Two orthogonal subspaces.
  CMatrix b1(3, 1), b2(3, 1);
  b1 << 1, 0, 0;
  b2 << 0, 1, 0;
  auto unchanged = refine_subspaces({Subspace{b1}, Subspace{b2}});
  CHECK(unchanged.size() == 2);

  // Two lines at 45 degrees: same rank, one singular value.
  CMatrix b3(2, 1);
  b3 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CMatrix b4(2, 1);
  b4 << 1, 0;
  auto pair = refine_subspaces({Subspace{b3}, Subspace{b4}});
  CHECK(pair.size() == 2);
}

TEST_CASE("refine_subspaces splits a shared direction") {
  // A 2-dim subspace and a line inside it: the line is carved out and the
  // remainder separates.
  CMatrix plane(3, 2);
  plane << 1, 0, 0, 1, 0, 0;
  CMatrix line(3, 1);
  line << 1, 0, 0;
  auto refined = refine_subspaces({Subspace{plane}, Subspace{line}});
  for (size_t i = 0; i < refined.size(); ++i) {
    CHECK(refined[i].rank() == 1);
    for (size_t j = i + 1; j < refined.size(); ++j) {
      double overlap = (refined[i].basis.adjoint() * refined[j].basis).norm();
      CHECK(overlap < 1e-9);
    }
  }
}

TEST_CASE("canonical_order on orthogonal subspaces concatenates seed bases") {
  CMatrix b1(3, 1), b2(3, 2);
  b1 << 0, 1, 0;
  b2 << 1, 0, 0, 0, 0, 1;
  auto vectors = canonical_order({Subspace{b1}, Subspace{b2}});
  REQUIRE(vectors.size() == 3);
  CHECK(std::abs(std::abs(vectors[0](1)) - 1.0) < 1e-12);
}

TEST_CASE("canonical_order slaves a non-orthogonal line to the seed") {
  double eta = 0.4;
  CMatrix b1(2, 1), b2(2, 1);
  b1 << 1, 0;
  b2 << std::cos(eta), std::sin(eta);
  auto vectors = canonical_order({Subspace{b1}, Subspace{b2}});
  REQUIRE(vectors.size() == 2);
  // The second vector is the normalized projection image of the first.
  CVector expected(2);
  expected << std::cos(eta), std::sin(eta);
  CHECK((vectors[1] - expected).norm() < 1e-12);
  CHECK(std::abs(vectors[0].dot(vectors[1]) - Complex(std::cos(eta))) < 1e-12);
}

TEST_CASE("canonical_order is deterministic") {
  std::mt19937 rng(131);
  CMatrix h = test::random_hermitian(rng, 4);
  auto subspaces = spectral_subspaces(h);
  auto first = canonical_order(subspaces);
  auto second = canonical_order(subspaces);
  REQUIRE(first.size() == second.size());
  for (size_t i = 0; i < first.size(); ++i)
    CHECK(std::memcmp(first[i].data(), second[i].data(), sizeof(Complex) * first[i].size()) ==
          0);
}

TEST_CASE("synthesize_control on the noiseless channel returns the identity") {
  std::mt19937 rng(137);
  KrausChannel id = make_kraus_channel({CMatrix::Identity(3, 3)});
  CMatrix r0 = test::random_matrix(rng, 3, 3);
  ControlSolution solution = synthesize_control(id, r0);
  CHECK(solution.succeeded);
  CHECK(solution.sanity_residual <= 1e-10);
  CHECK(distance_up_to_phase(solution.u_c, CMatrix::Identity(3, 3)) < 1e-9);
}

TEST_CASE("synthesize_control on single-unitary channels") {
  std::mt19937 rng(139);
  for (int trial = 0; trial < 8; ++trial) {
    int d = 2 + trial % 3;
    CMatrix w = test::random_unitary(rng, d);
    KrausChannel ch = make_kraus_channel({w});
    CMatrix r0 = test::random_matrix(rng, d, d);
    ControlSolution solution = synthesize_control(ch, r0);
    CHECK(solution.succeeded);
    CHECK(solution.sanity_residual <= 1e-8);
    auto [r1, r2] = hermitian_split(r0);
    CHECK((solution.u_c.adjoint() * r1 * solution.u_c - w * r1 * w.adjoint()).norm() <
          1e-7 * std::max(1.0, r1.norm()));
  }
}

TEST_CASE("synthesize_control recovers the CNOT gate for the heisenberg noise") {
  HeisenbergParams params;
  KrausChannel noise = heisenberg_noise_kraus(params);
  CMatrix ut = heisenberg_ut(params, params.theta0);
  CMatrix r1 = heisenberg_r1(params, params.theta0);
  CMatrix r_tilde = ut * r1 * ut.adjoint();

  ControlSolution solution = synthesize_control(noise, r_tilde);
  CHECK(solution.succeeded);
  CHECK(solution.sanity_residual <= 1e-8);
  CHECK(distance_up_to_phase(solution.u_c, cnot()) < 1e-6);

  // The transition-matrix route gives the same answer.
  ControlSolution via_t = synthesize_control(kraus_to_transition(noise), r_tilde);
  CHECK(via_t.succeeded);
  CHECK((via_t.u_c - solution.u_c).norm() < 1e-9);
}

TEST_CASE("synthesize_control is bit-deterministic") {
  HeisenbergParams params;
  KrausChannel noise = heisenberg_noise_kraus(params);
  CMatrix ut = heisenberg_ut(params, params.theta0);
  CMatrix r_tilde = ut * heisenberg_r1(params, params.theta0) * ut.adjoint();
  ControlSolution a = synthesize_control(noise, r_tilde);
  ControlSolution b = synthesize_control(noise, r_tilde);
  REQUIRE(a.u_c.size() == b.u_c.size());
  CHECK(std::memcmp(a.u_c.data(), b.u_c.data(), sizeof(Complex) * a.u_c.size()) == 0);
}

TEST_CASE("sanity check fails cleanly when no unitary exists") {
  // The qutrit transpose map preserves every individual spectrum but
  // conjugates the joint word traces of (R1, R2), so for a generic r0 the
  // two Hermitian parts cannot be mapped by one unitary: the canonical
  // Gram matrices disagree and the sanity check reports nonexistence.
  CMatrix transpose_map = CMatrix::Zero(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) transpose_map(i * 3 + j, j * 3 + i) = 1.0;
  TransitionMatrix t = make_transition_matrix(3, transpose_map);

  std::mt19937 rng(149);
  CMatrix r0 = test::random_matrix(rng, 3, 3);
  ControlSolution solution = synthesize_control(t, r0);
  CHECK_FALSE(solution.succeeded);
  CHECK(solution.sanity_residual > 1e-6);
  CHECK(is_unitary(solution.u_c, 1e-10));
}

TEST_CASE("sanity check fails cleanly when the channel damps one Hermitian part") {
  // Heisenberg noise with the sx(x)sx Kraus factor replaced by sx(x)sz:
  // the first Hermitian part still maps to its CNOT image but the second
  // one shrinks by 1 - 2 p1, so no unitary can reproduce the action.
  HeisenbergParams params;
  double p0 = 1.0 - params.p1 - params.p2 - params.p3;
  std::vector<CMatrix> ops;
  ops.push_back(std::sqrt(p0) * heisenberg_w(params.phi[0]));
  ops.push_back(std::sqrt(params.p1) * heisenberg_w(params.phi[1]) *
                kron(pauli_x(), pauli_z()));
  ops.push_back(std::sqrt(params.p2) * heisenberg_w(params.phi[2]) *
                kron(pauli_x(), pauli_y()));
  ops.push_back(std::sqrt(params.p3) * heisenberg_w(params.phi[3]) *
                kron(identity(2), pauli_z()));
  KrausChannel modified = make_kraus_channel(std::move(ops));

  CMatrix ut = heisenberg_ut(params, params.theta0);
  CMatrix r_tilde = ut * heisenberg_r1(params, params.theta0) * ut.adjoint();
  ControlSolution solution = synthesize_control(modified, r_tilde);
  CHECK_FALSE(solution.succeeded);
  CHECK(solution.sanity_residual > 0.01);
}

TEST_CASE("gram matrices of the canonical vectors match exactly when synthesis succeeds") {
  HeisenbergParams params;
  KrausChannel noise = heisenberg_noise_kraus(params);
  CMatrix ut = heisenberg_ut(params, params.theta0);
  CMatrix r_tilde = ut * heisenberg_r1(params, params.theta0) * ut.adjoint();

  auto gram_of = [](const std::vector<CVector>& vectors) {
    CMatrix g(vectors.size(), vectors.size());
    for (size_t i = 0; i < vectors.size(); ++i)
      for (size_t j = 0; j < vectors.size(); ++j) g(i, j) = vectors[i].dot(vectors[j]);
    return g;
  };

  auto [r1, r2] = hermitian_split(r_tilde);
  std::vector<Subspace> in_subspaces;
  std::vector<Subspace> out_subspaces;
  for (const CMatrix& r : {r1, r2}) {
    auto parts = spectral_subspaces(r);
    in_subspaces.insert(in_subspaces.end(), parts.begin(), parts.end());
    CMatrix mapped = CMatrix::Zero(4, 4);
    for (const CMatrix& k : noise.kraus_ops) mapped += k * r * k.adjoint();
    mapped = (mapped + mapped.adjoint()) / 2.0;
    auto mapped_parts = spectral_subspaces(mapped);
    out_subspaces.insert(out_subspaces.end(), mapped_parts.begin(), mapped_parts.end());
  }
  auto in_vectors = canonical_order(refine_subspaces(in_subspaces));
  auto out_vectors = canonical_order(refine_subspaces(out_subspaces));
  REQUIRE(in_vectors.size() == out_vectors.size());
  CHECK((gram_of(in_vectors) - gram_of(out_vectors)).norm() <= 1e-8);
}

TEST_CASE("verify_control on the heisenberg channel") {
  HeisenbergParams params;
  Scenario s = heisenberg_noisy(params);
  KrausChannel noise = heisenberg_noise_kraus(params);
  CMatrix ut = heisenberg_ut(params, params.theta0);
  CMatrix r1 = heisenberg_r1(params, params.theta0);

  ControlSolution tilde = synthesize_control(noise, CMatrix(ut * r1 * ut.adjoint()));
  REQUIRE(tilde.succeeded);
  CMatrix u_c = ut.adjoint() * tilde.u_c;

  CHECK(verify_control(s.channel, u_c, r1));
  CHECK_FALSE(verify_control(s.channel, CMatrix(CMatrix::Identity(4, 4)), r1));
}

TEST_CASE("verify_control accepts the identity for a noiseless channel") {
  TransitionMatrix id{2, CMatrix::Identity(4, 4)};
  ParamChannel pc = constant_channel(id);
  // Give the family a nonzero signal so the regulated channel has a moving
  // peripheral eigenvalue.
  pc.t_dot = [](double) {
    CMatrix dot = CMatrix::Zero(4, 4);
    dot(1, 1) = Complex(0, 1);
    dot(2, 2) = Complex(0, -1);
    return dot;
  };
  CMatrix r0(2, 2);
  r0 << 0, 1, 0, 0;
  CHECK(verify_control(pc, CMatrix(CMatrix::Identity(2, 2)), r0));
}

TEST_CASE("end-to-end: synthesized control restores the Heisenberg scaling") {
  HeisenbergParams params;
  Scenario s = heisenberg_noisy(params);
  Theorem2Conditions cond = check_theorem2_conditions(s.channel);
  REQUIRE(cond.signal_nonvanishing);
  REQUIRE(cond.signal_normal);
  REQUIRE(!cond.r0_candidates.empty());

  ControlSolution solution =
      synthesize_control(s.channel.at(params.theta0), cond.r0_candidates[0]);
  REQUIRE(solution.succeeded);

  CMatrix r0 = cond.r0_candidates[0];
  CMatrix direction = r0 + r0.adjoint();
  CMatrix rho = CMatrix::Identity(4, 4) / 4.0 + (0.2 / direction.norm() / 2.0) * direction;
  DensityMatrix rho0 = make_density_matrix((rho + rho.adjoint()) / 2.0);
  AsymptoticQfiReport rep = asymptotic_qfi(compose_control(s.channel, solution.u_c), rho0);
  CHECK(rep.n2_coefficient > 1e-10);
}
