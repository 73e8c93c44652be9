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

#include <complex>

#include <Eigen/Dense>

namespace metrospec {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kImag{0.0, 1.0};

/// Kronecker product, (a ⊗ b)[(i*rb+k),(j*cb+l)] = a(i,j) b(k,l).
CMatrix kron(const CMatrix& a, const CMatrix& b);

bool all_finite(const CMatrix& a);
bool is_hermitian(const CMatrix& a, double tol);
bool is_unitary(const CMatrix& a, double tol);

/// Largest singular value (spectral norm).
double operator_norm(const CMatrix& a);

// Pauli matrices and friends.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix identity(int d);

}  // namespace metrospec
