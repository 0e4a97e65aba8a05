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

#include "cqrabi/metrics.hpp"

#include <cmath>
#include <limits>

#include "cqrabi/linalg.hpp"

namespace cqrabi {

namespace {

Index local_dimension(const Matrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("operator must be square");
  const auto d = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(u.rows()))));
  if (d * d != u.rows()) throw std::invalid_argument("operator is not bipartite with equal local dimensions");
  return d;
}

}  // namespace

double state_fidelity(const Vector& psi, const Vector& target) {
  if (psi.size() != target.size()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  return std::norm(target.dot(psi));
}

double state_fidelity(const Matrix& rho, const Vector& target) {
  if (rho.rows() != target.size() || rho.cols() != target.size()) {
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  }
  return target.dot(rho * target).real();
}

double state_fidelity(const StateVector& psi, const StateVector& target) {
  if (!(psi.layout() == target.layout())) throw std::invalid_argument("state_fidelity: layout mismatch");
  return state_fidelity(psi.amplitudes(), target.amplitudes());
}

double state_fidelity(const DensityMatrix& rho, const StateVector& target) {
  if (!(rho.layout() == target.layout())) throw std::invalid_argument("state_fidelity: layout mismatch");
  return state_fidelity(rho.matrix(), target.amplitudes());
}

Matrix rearrange(const Matrix& u) {
  const Index d = local_dimension(u);
  Matrix r(u.rows(), u.cols());
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l) r(i * d + j, k * d + l) = u(i * d + k, j * d + l);
  return r;
}

double operator_linear_entropy(const Matrix& u) {
  const auto d = static_cast<double>(local_dimension(u));
  const Matrix r = rearrange(u);
  const Matrix rr = r * r.adjoint();
  return 1.0 - (rr * rr).trace().real() / std::pow(d, 4);
}

Matrix swap_operator(Index d) {
  Matrix s = Matrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
  return s;
}

double entangling_power(const Matrix& u) {
  const Index d = local_dimension(u);
  if (linalg::unitarity_error(u) > 1e-8) throw std::invalid_argument("entangling_power: operator is not unitary");
  const Matrix s = swap_operator(d);
  const double f = static_cast<double>(d) / (d + 1.0);
  return f * f * (operator_linear_entropy(u) + operator_linear_entropy(u * s) - operator_linear_entropy(s));
}

std::vector<Matrix> pauli_basis(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("pauli_basis: n_qubits must be >= 1");
  std::vector<Matrix> single(4, Matrix::Zero(2, 2));
  single[0] << 1.0, 0.0, 0.0, 1.0;
  single[1] << 0.0, 1.0, 1.0, 0.0;
  single[2] << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  single[3] << 1.0, 0.0, 0.0, -1.0;
  std::vector<Matrix> basis{Matrix::Identity(1, 1)};
  for (int q = 0; q < n_qubits; ++q) {
    std::vector<Matrix> next;
    next.reserve(basis.size() * 4);
    for (const auto& b : basis)
      for (const auto& p : single) next.push_back(linalg::kron(b, p));
    basis = std::move(next);
  }
  return basis;
}

double process_fidelity(const std::vector<Matrix>& outputs, const Matrix& ideal) {
  const Index d = ideal.rows();
  const int n_qubits = static_cast<int>(std::lround(std::log2(static_cast<double>(d))));
  if ((Index{1} << n_qubits) != d) throw std::invalid_argument("process_fidelity: dimension is not a power of two");
  const auto basis = pauli_basis(n_qubits);
  if (outputs.size() != basis.size()) throw std::invalid_argument("process_fidelity: wrong number of channel outputs");
  Complex acc = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (outputs[j].rows() != d || outputs[j].cols() != d) {
      throw std::invalid_argument("process_fidelity: channel output has the wrong dimension");
    }
    acc += (ideal * basis[j].adjoint() * ideal.adjoint() * outputs[j]).trace();
  }
  return acc.real() / std::pow(static_cast<double>(d), 3);
}

double process_fidelity(const Channel& channel, const Matrix& ideal) {
  const int n_qubits = static_cast<int>(std::lround(std::log2(static_cast<double>(ideal.rows()))));
  std::vector<Matrix> outputs;
  for (const auto& w : pauli_basis(n_qubits)) outputs.push_back(channel(w));
  return process_fidelity(outputs, ideal);
}

PhaseAlignment equal_up_to_global_phase(const Matrix& a, const Matrix& b, double tolerance) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("equal_up_to_global_phase: shape mismatch");
  PhaseAlignment r;
  const Complex overlap = (b.adjoint() * a).trace();
  r.phase = std::abs(overlap) > 0.0 ? std::arg(overlap) : 0.0;
  const double nb = b.norm();
  r.residual = (a - std::polar(1.0, r.phase) * b).norm() / (nb > 0.0 ? nb : 1.0);
  r.equal = r.residual < tolerance;
  return r;
}

Matrix cnot() {
  Matrix c = Matrix::Zero(4, 4);
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
  return c;
}

LocalUnitaries cnot_local_unitaries() {
  const double h = 1.0 / std::sqrt(2.0);
  const Complex i = kI;
  LocalUnitaries u;
  u.u1 << h, -h, -h, -h;
  u.u2 << 1.0, 0.0, 0.0, 1.0;
  u.u3 << h, i * h, -h, i * h;
  u.u4 << h, i * h, i * h, h;
  return u;
}

Matrix xx_gate(double phi) {
  Matrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  return std::cos(0.5 * phi) * Matrix::Identity(4, 4) + kI * std::sin(0.5 * phi) * linalg::kron(x, x);
}

GateAnalysis analyze_gate(const Matrix& gate, const std::vector<Matrix>& outputs) {
  GateAnalysis g;
  g.entangling_power = entangling_power(gate);
  const LocalUnitaries u = cnot_local_unitaries();
  const Matrix corrected = linalg::kron(u.u1, u.u2) * gate * linalg::kron(u.u3, u.u4);
  const PhaseAlignment a = equal_up_to_global_phase(corrected, cnot());
  g.cnot_equivalent = a.equal;
  g.residual = a.residual;
  g.process_fidelity = outputs.empty() ? std::numeric_limits<double>::quiet_NaN() : process_fidelity(outputs, gate);
  return g;
}

}  // namespace cqrabi
