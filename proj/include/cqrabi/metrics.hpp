// Copyright 2026 The cqrabi Authors
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

#include "cqrabi/hilbert.hpp"

namespace cqrabi {

/// |<target|psi>|^2.
double state_fidelity(const StateVector& psi, const StateVector& target);
/// <target|rho|target>.
double state_fidelity(const DensityMatrix& rho, const StateVector& target);

double state_fidelity(const Vector& psi, const Vector& target);
double state_fidelity(const Matrix& rho, const Vector& target);

/// U^R_{(ij),(kl)} = U_{(ik),(jl)} for a (d*d) x (d*d) operator.
Matrix rearrange(const Matrix& u);

/// E(U) = 1 - Tr[(U^R U^R^dag)^2] / d^4.
double operator_linear_entropy(const Matrix& u);

/// S = sum_ij |ij><ji| on d x d.
Matrix swap_operator(Index d);

/// e_p(U) = (d/(d+1))^2 [E(U) + E(U S) - E(S)]. Throws for non-unitary input.
double entangling_power(const Matrix& u);

/// Pauli strings over n qubits in lexicographic (I, X, Y, Z) order,
/// unnormalized (Tr W^dag W = 2^n).
std::vector<Matrix> pauli_basis(int n_qubits);

using Channel = std::function<Matrix(const Matrix&)>;

/// (1/d^3) sum_j Tr[U W_j^dag U^dag E(W_j)] over the Pauli basis.
double process_fidelity(const Channel& channel, const Matrix& ideal);
/// The same sum with the channel outputs E(W_j) given in basis order.
double process_fidelity(const std::vector<Matrix>& outputs, const Matrix& ideal);

struct PhaseAlignment {
  bool equal = false;
  double phase = 0.0;     // theta with A ~ e^{i theta} B
  double residual = 0.0;  // ||A - e^{i theta} B|| / ||B||
};

PhaseAlignment equal_up_to_global_phase(const Matrix& a, const Matrix& b, double tolerance = 1e-8);

/// CNOT with qubit 1 as control, basis order |00>, |01>, |10>, |11>.
Matrix cnot();

struct LocalUnitaries {
  Eigen::Matrix2cd u1, u2, u3, u4;
};

/// Local unitaries with CNOT = (u1 x u2) G (u3 x u4) for
/// G = (I + i sigma_x sigma_x) / sqrt 2 up to a global phase.
LocalUnitaries cnot_local_unitaries();

/// cos(phi/2) I + i sin(phi/2) sigma_1^x sigma_2^x.
Matrix xx_gate(double phi);

struct GateAnalysis {
  double entangling_power = 0.0;
  double process_fidelity = 0.0;
  bool cnot_equivalent = false;
  double residual = 0.0;  // distance to CNOT after the local correction
};

/// Entangling power, CNOT equivalence of the unitary `gate`, and process
/// fidelity of `outputs` (Pauli-basis channel outputs) against `gate`.
GateAnalysis analyze_gate(const Matrix& gate, const std::vector<Matrix>& outputs);

}  // namespace cqrabi
