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

#include <cmath>
#include <random>

#include "metrospec/errors.hpp"
#include "metrospec/numerics.hpp"
#include "metrospec/scenarios.hpp"
#include "test_helpers.hpp"

using namespace metrospec;

namespace {

std::vector<Complex> sorted_eigenvalues(const CMatrix& m) {
  std::vector<Complex> values;
  for (const EigPair& p : eig_general(m)) values.push_back(p.value);
  return values;
}

bool contains_eigenvalue(const std::vector<Complex>& values, Complex target, double tol) {
  for (const Complex& v : values)
    if (std::abs(v - target) <= tol) return true;
  return false;
}

}  // namespace

TEST_CASE("dephasing transition eigenvalues across parameter points") {
  struct Case {
    double p, phi;
  };
  for (const Case& c : {Case{0.0, M_PI / 4}, Case{0.1, M_PI / 4}, Case{0.5, 1.0}}) {
    Scenario s = dephasing([c](double) { return c.p; }, [c](double) { return c.phi; }, 0.0);
    auto values = sorted_eigenvalues(s.channel.at(0.0).t);
    CHECK(contains_eigenvalue(values, Complex(1.0), 1e-10));
    double magnitude = 1.0 - 2.0 * c.p;
    CHECK(contains_eigenvalue(values, magnitude * std::exp(Complex(0, c.phi)), 1e-10));
    CHECK(contains_eigenvalue(values, magnitude * std::exp(Complex(0, -c.phi)), 1e-10));
  }

  // p = 0, phi = 0 is the identity channel.
  Scenario trivial = dephasing([](double) { return 0.0; }, [](double) { return 0.0; }, 0.0);
  CHECK((trivial.channel.at(0.0).t - CMatrix::Identity(4, 4)).norm() < 1e-12);

  // p = 1/2 collapses the off-diagonal eigenvalues to zero.
  Scenario half = dephasing([](double) { return 0.5; }, [](double) { return 0.4; }, 0.0);
  auto values = sorted_eigenvalues(half.channel.at(0.0).t);
  CHECK(std::abs(values[2]) < 1e-12);
  CHECK(std::abs(values[3]) < 1e-12);
}

TEST_CASE("dephasing rejects p outside [0, 1]") {
  Scenario s = dephasing([](double th) { return th; }, [](double) { return 0.0; }, 0.0);
  CHECK_THROWS_AS(s.channel.at(1.5), DomainViolation);
  CHECK_THROWS_AS(s.channel.at(-0.1), DomainViolation);
}

TEST_CASE("qutrit decay completeness and eigenstructure") {
  Scenario s = qutrit_decay(0.2);
  KrausChannel ch = s.kraus_at(0.2);
  CMatrix sum = CMatrix::Zero(3, 3);
  for (const CMatrix& k : ch.kraus_ops) sum += k.adjoint() * k;
  CHECK((sum - CMatrix::Identity(3, 3)).norm() < 1e-12);

  // The second eigenmatrix is diag(1/2, 1/2, -1) with eigenvalue -1+2theta.
  CMatrix expected = CMatrix::Zero(3, 3);
  expected(0, 0) = 0.5;
  expected(1, 1) = 0.5;
  expected(2, 2) = -1.0;
  CVector target = vectorize(expected).normalized();
  auto pairs = eig_general(s.channel.at(0.2).t);
  bool found = false;
  for (const EigPair& p : pairs) {
    if (std::abs(p.value - Complex(-1.0 + 2.0 * 0.2)) < 1e-10) {
      CHECK(std::abs(std::abs(p.right.dot(target)) - 1.0) < 1e-9);
      found = true;
    }
  }
  CHECK(found);

  CHECK_THROWS_AS(qutrit_decay(0.7), DomainViolation);
}

TEST_CASE("qutrit analytic derivative equals the one-sided difference") {
  for (double theta0 : {0.0, 0.1, 0.25}) {
    Scenario s = qutrit_decay(theta0);
    CMatrix analytic = derivative(s.channel);
    double h = 1e-7;
    CMatrix numeric = (s.channel.at(theta0 + h).t - s.channel.at(theta0).t) / h;
    CHECK((analytic - numeric).norm() <= 1e-6 * std::max(1.0, analytic.norm()));
  }
}

TEST_CASE("heisenberg noise reduces to a single unitary at zero noise weights") {
  HeisenbergParams params;
  params.p1 = params.p2 = params.p3 = 0.0;
  params.phi = {0.0, 0.0, 0.0, 0.0};
  CMatrix noise = heisenberg_noise_transition(params);
  CMatrix w1 = heisenberg_w(0.0);
  CHECK((noise - kron(w1, w1.conjugate())).norm() < 1e-12);
}

TEST_CASE("heisenberg noise matrix entries follow the displayed pattern") {
  HeisenbergParams params;
  params.p1 = 0.1;
  params.p2 = 0.2;
  params.p3 = 0.3;
  params.phi = {0.3, 0.7, 1.1, 1.9};
  CMatrix noise = heisenberg_noise_transition(params);
  Complex w1 = Complex(1.0 - params.p1 - params.p2);
  Complex w2 = Complex(params.p1 + params.p2);
  CHECK(std::abs(noise(0, 0) - w1) < 1e-14);   // entry (1,1)
  CHECK(std::abs(noise(0, 15) - w2) < 1e-14);  // entry (1,16)
  Complex w3 = std::exp(Complex(0, -0.3)) * (1.0 - 0.1 - 0.2 - 0.3) -
               std::exp(Complex(0, -1.9)) * 0.3;
  CHECK(std::abs(noise(1, 1) - w3) < 1e-14);  // entry (2,2)
}

TEST_CASE("heisenberg noise is trace preserving and unital") {
  HeisenbergParams params;
  params.p1 = 0.1;
  params.p2 = 0.2;
  params.p3 = 0.3;
  params.phi = {0.3, 0.7, 1.1, 1.9};
  TransitionMatrix noise = make_transition_matrix(4, heisenberg_noise_transition(params));
  CHECK(unitality_check(noise));
}

TEST_CASE("heisenberg explicit matrix equals the Kraus construction across draws") {
  std::mt19937 rng(151);
  std::uniform_real_distribution<double> weight(0.0, 0.33);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int trial = 0; trial < 20; ++trial) {
    HeisenbergParams params;
    params.p1 = weight(rng);
    params.p2 = weight(rng);
    params.p3 = weight(rng);
    params.phi = {angle(rng), angle(rng), angle(rng), angle(rng)};
    CMatrix explicit_t = heisenberg_noise_transition(params);
    CMatrix from_kraus = kraus_to_transition(heisenberg_noise_kraus(params)).t;
    CHECK((explicit_t - from_kraus).norm() <= 1e-10);
  }
}

TEST_CASE("heisenberg input state") {
  HeisenbergParams params;
  DensityMatrix rho = heisenberg_input_state(params, 0.2);
  auto eig = eig_hermitian(rho.rho);
  // Eigenvalues 1/4 +- alpha, each twice.
  CHECK(eig.values(0) == doctest::Approx(0.45));
  CHECK(eig.values(1) == doctest::Approx(0.45));
  CHECK(eig.values(2) == doctest::Approx(0.05));
  CHECK(eig.values(3) == doctest::Approx(0.05));

  CHECK_THROWS_AS(heisenberg_input_state(params, 0.3), DomainViolation);
  CHECK_THROWS_AS(heisenberg_input_state(params, 0.0), DomainViolation);
}

TEST_CASE("heisenberg parameter validation") {
  HeisenbergParams params;
  params.p1 = 0.6;
  params.p2 = 0.5;
  CHECK_THROWS_AS(heisenberg_noise_transition(params), DomainViolation);
}

TEST_CASE("scenario channels satisfy the channel invariants at random parameters") {
  std::mt19937 rng(157);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int trial = 0; trial < 10; ++trial) {
    double theta = 0.05 + 0.4 * unit(rng);

    Scenario deph = dephasing([](double th) { return th; }, [](double) { return 1.1; }, theta);
    TransitionMatrix t = deph.channel.at(theta);
    CVector id_vec = vectorize(CMatrix::Identity(2, 2));
    CHECK((t.t.adjoint() * id_vec - id_vec).norm() < 1e-10);

    Scenario qutrit = qutrit_decay(theta);
    TransitionMatrix qt = qutrit.channel.at(theta);
    CVector id3 = vectorize(CMatrix::Identity(3, 3));
    CHECK((qt.t.adjoint() * id3 - id3).norm() < 1e-10);
    auto pairs = eig_general(qt.t);
    CHECK(std::abs(pairs[0].value) <= 1.0 + 1e-9);

    HeisenbergParams params;
    params.p1 = 0.3 * unit(rng);
    params.p2 = 0.3 * unit(rng);
    params.p3 = 0.3 * unit(rng);
    params.theta0 = theta;
    Scenario heis = heisenberg_noisy(params);
    TransitionMatrix ht = heis.channel.at(theta);
    CVector id4 = vectorize(CMatrix::Identity(4, 4));
    CHECK((ht.t.adjoint() * id4 - id4).norm() < 1e-9);
  }
}

TEST_CASE("robustness sweep is flat across second-qubit preparations") {
  HeisenbergParams params;
  std::vector<std::array<double, 3>> bloch{{0, 0, 0}, {0, 0, 1}};
  auto reports = robustness_sweep(params, 0.4, 0.2, bloch);
  REQUIRE(reports.size() == 2);
  CHECK(std::abs(reports[0].n2_coefficient - reports[1].n2_coefficient) <= 1e-8);
  CHECK(reports[0].n2_coefficient > 1e-3);
}

TEST_CASE("robustness sweep rejects bad inputs") {
  HeisenbergParams params;
  CHECK_THROWS_AS(robustness_sweep(params, 0.0, 0.3, {{0, 0, 0}}), DomainViolation);
  CHECK_THROWS_AS(robustness_sweep(params, 0.0, 0.2, {{1, 1, 1}}), DomainViolation);
}
