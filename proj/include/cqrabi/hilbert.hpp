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

#include <vector>

#include "cqrabi/types.hpp"

namespace cqrabi {

/// Tensor-product layout of N qubits and one truncated boson mode.
///
/// Ordering: qubit 1 is the most significant factor, the boson mode is the
/// least significant. Each qubit uses the basis (|e>, |g>), so sigma_z is
/// diag(+1, -1) and the all-ground state |gg...g> is spin index 2^N - 1.
/// The composite index of (spin index s, photon number n) is s * fock_dim + n.
class HilbertLayout {
 public:
  HilbertLayout(int n_qubits, int fock_dim);

  int n_qubits() const { return n_qubits_; }
  int fock_dim() const { return fock_dim_; }
  Index spin_dim() const { return Index{1} << n_qubits_; }
  Index dim() const { return spin_dim() * fock_dim_; }
  Index index(Index spin, Index photons) const { return spin * fock_dim_ + photons; }
  /// Spin index of |gg...g>.
  Index ground_spin_index() const { return spin_dim() - 1; }

  bool operator==(const HilbertLayout&) const = default;

 private:
  int n_qubits_;
  int fock_dim_;
};

/// Validated layout; throws std::invalid_argument for n_qubits < 1 or fock_dim < 2.
HilbertLayout build_layout(int n_qubits, int fock_dim);

class StateVector;

/// Dense operator on a layout.
class Operator {
 public:
  Operator(HilbertLayout layout, Matrix entries);
  static Operator identity(const HilbertLayout& layout);
  static Operator zero(const HilbertLayout& layout);

  const HilbertLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return entries_; }
  Matrix& matrix() { return entries_; }
  Index dim() const { return entries_.rows(); }

  Operator adjoint() const { return {layout_, entries_.adjoint()}; }
  StateVector apply(const StateVector& psi) const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(Complex s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Complex s, Operator a) { return a *= s; }
  friend Operator operator*(Operator a, Complex s) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  HilbertLayout layout_;
  Matrix entries_;
};

/// Pure state on a layout.
class StateVector {
 public:
  StateVector(HilbertLayout layout, Vector amplitudes);

  const HilbertLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Vector& amplitudes() { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;

 private:
  HilbertLayout layout_;
  Vector amplitudes_;
};

/// Density operator on a layout. Construction checks shape, Hermiticity
/// (1e-10) and unit trace (1e-8); positivity is checked on demand.
class DensityMatrix {
 public:
  DensityMatrix(HilbertLayout layout, Matrix entries);
  static DensityMatrix pure(const StateVector& psi);

  const HilbertLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return entries_; }
  Complex trace() const { return entries_.trace(); }
  double purity() const;
  double min_eigenvalue() const;

 private:
  HilbertLayout layout_;
  Matrix entries_;
};

enum class Axis { x, y, z, plus, minus, squared };
enum class QuantizationAxis { x, z };
enum class CatParity { even, odd };

/// Collective spin operator J_alpha = (1/2) sum_k sigma^alpha_k (or J+-, J^2)
/// acting as identity on the boson mode.
Operator collective_operator(const HilbertLayout& layout, Axis axis);

/// Spin-register vector |N/2, m>_axis of dimension 2^N.
///
/// z states are the Dicke states with non-negative coefficients. x states
/// are generated from ((|g>+|e>)/sqrt2)^N = |N/2, N/2>_x by the x-axis
/// lowering operator J_y - i J_z with real positive ladder coefficients,
/// which fixes the phase of every x eigenvector.
Vector collective_spin_vector(int n_qubits, double m, QuantizationAxis axis);

/// |j, m>_axis tensored with the boson vacuum. Only j = N/2 is supported.
StateVector collective_state(const HilbertLayout& layout, double j, double m, QuantizationAxis axis);

/// Coefficients C_M of |N/2, -N/2>_z = sum_M C_M |N/2, M>_x, index M + N/2.
std::vector<Complex> zbasis_to_xbasis_coefficients(int n_qubits);

/// D(beta) = exp(beta a^dag - beta^* a) on a fock_dim-dimensional mode.
Matrix boson_displacement(int fock_dim, Complex beta);

/// Truncated coherent state D(alpha)|0>.
Vector coherent_vector(int fock_dim, Complex alpha);

/// Normalized N(|alpha> +- |-alpha>) on the boson mode.
Vector cat_vector(int fock_dim, Complex alpha, CatParity parity);

/// Closed form [2(1 +- exp(-2|alpha|^2))]^(-1/2).
double cat_normalization(Complex alpha, CatParity parity);

/// D(beta) on the full layout (identity on the spins). Warns when
/// |beta|^2 > fock_dim / 4.
Operator displacement_operator(const HilbertLayout& layout, Complex beta);

/// Cat state of the boson mode tensored with a spin register state
/// (|gg...g> when spin is empty).
StateVector cat_state(const HilbertLayout& layout, Complex alpha, CatParity parity, const Vector& spin = {});

/// spin (2^N) tensor boson (fock_dim).
StateVector product_state(const HilbertLayout& layout, const Vector& spin, const Vector& boson);

/// Boson Fock state |n>.
Vector fock_vector(int fock_dim, int n);

}  // namespace cqrabi
