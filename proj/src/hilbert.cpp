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

#include "cqrabi/hilbert.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "cqrabi/linalg.hpp"
#include "cqrabi/operators.hpp"

namespace cqrabi {

namespace {

bool is_half_integer(double x) { return std::abs(2.0 * x - std::round(2.0 * x)) < 1e-12; }

int twice(double x) { return static_cast<int>(std::lround(2.0 * x)); }

Matrix boson_annihilation(int fock_dim) {
  Matrix a = Matrix::Zero(fock_dim, fock_dim);
  for (int n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

}  // namespace

HilbertLayout::HilbertLayout(int n_qubits, int fock_dim) : n_qubits_(n_qubits), fock_dim_(fock_dim) {
  if (n_qubits < 1) throw std::invalid_argument("HilbertLayout: n_qubits must be >= 1");
  if (fock_dim < 2) throw std::invalid_argument("HilbertLayout: fock_dim must be >= 2");
  if (n_qubits > 20) throw std::invalid_argument("HilbertLayout: n_qubits > 20 is not supported");
}

HilbertLayout build_layout(int n_qubits, int fock_dim) { return HilbertLayout(n_qubits, fock_dim); }

// ---------------------------------------------------------------- Operator

Operator::Operator(HilbertLayout layout, Matrix entries) : layout_(layout), entries_(std::move(entries)) {
  if (entries_.rows() != layout_.dim() || entries_.cols() != layout_.dim()) {
    throw std::invalid_argument("Operator: matrix size does not match layout dimension");
  }
}

Operator Operator::identity(const HilbertLayout& layout) {
  return {layout, Matrix::Identity(layout.dim(), layout.dim())};
}

Operator Operator::zero(const HilbertLayout& layout) { return {layout, Matrix::Zero(layout.dim(), layout.dim())}; }

StateVector Operator::apply(const StateVector& psi) const {
  if (!(psi.layout() == layout_)) throw std::invalid_argument("Operator::apply: layout mismatch");
  return {layout_, entries_ * psi.amplitudes()};
}

Operator& Operator::operator+=(const Operator& other) {
  if (!(other.layout_ == layout_)) throw std::invalid_argument("Operator: layout mismatch");
  entries_ += other.entries_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  if (!(other.layout_ == layout_)) throw std::invalid_argument("Operator: layout mismatch");
  entries_ -= other.entries_;
  return *this;
}

Operator& Operator::operator*=(Complex s) {
  entries_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  if (!(a.layout_ == b.layout_)) throw std::invalid_argument("Operator: layout mismatch");
  return {a.layout_, a.entries_ * b.entries_};
}

// ------------------------------------------------------------- StateVector

StateVector::StateVector(HilbertLayout layout, Vector amplitudes)
    : layout_(layout), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != layout_.dim()) {
    throw std::invalid_argument("StateVector: amplitude count does not match layout dimension");
  }
}

StateVector StateVector::normalized() const {
  const double nrm = norm();
  if (nrm == 0.0) throw std::invalid_argument("StateVector: cannot normalize the zero vector");
  return {layout_, amplitudes_ / nrm};
}

// ----------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(HilbertLayout layout, Matrix entries) : layout_(layout), entries_(std::move(entries)) {
  if (entries_.rows() != layout_.dim() || entries_.cols() != layout_.dim()) {
    throw std::invalid_argument("DensityMatrix: matrix size does not match layout dimension");
  }
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  if (std::abs(entries_.trace() - 1.0) > 1e-8) throw std::invalid_argument("DensityMatrix: trace differs from 1");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const Vector v = psi.normalized().amplitudes();
  return {psi.layout(), v * v.adjoint()};
}

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

double DensityMatrix::min_eigenvalue() const { return linalg::min_hermitian_eigenvalue(entries_); }

// ------------------------------------------------------- collective algebra

Operator collective_operator(const HilbertLayout& layout, Axis axis) {
  const OperatorSet ops = make_operator_set(layout, SpinSector::full);
  switch (axis) {
    case Axis::x:
      return {layout, Matrix(ops.jx)};
    case Axis::y:
      return {layout, Matrix(ops.jy)};
    case Axis::z:
      return {layout, Matrix(ops.jz)};
    case Axis::plus:
      return {layout, Matrix(ops.jp)};
    case Axis::minus:
      return {layout, Matrix(ops.jm)};
    case Axis::squared: {
      const SparseMatrix j2 = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
      return {layout, Matrix(j2)};
    }
  }
  throw std::invalid_argument("collective_operator: unknown axis");
}

Vector collective_spin_vector(int n_qubits, double m, QuantizationAxis axis) {
  if (n_qubits < 1) throw std::invalid_argument("collective_spin_vector: n_qubits must be >= 1");
  const double j = 0.5 * n_qubits;
  if (!is_half_integer(m) || m < -j - 1e-12 || m > j + 1e-12 || twice(m - (-j)) % 2 != 0) {
    std::ostringstream msg;
    msg << "collective_spin_vector: m = " << m << " is not in {-j, ..., j} for j = " << j;
    throw std::invalid_argument(msg.str());
  }
  const Index spin_dim = Index{1} << n_qubits;
  const int excitations = twice(m + j) / 2;

  if (axis == QuantizationAxis::z) {
    // Equal-weight superposition of bitstrings with `excitations` qubits in |e>.
    Vector v = Vector::Zero(spin_dim);
    int count = 0;
    for (Index s = 0; s < spin_dim; ++s) {
      // Bit value 0 marks |e>.
      const int ground_bits = std::popcount(static_cast<unsigned long long>(s));
      if (n_qubits - ground_bits == excitations) {
        v(s) = 1.0;
        ++count;
      }
    }
    return v / std::sqrt(static_cast<double>(count));
  }

  // |N/2, N/2>_x = ((|e> + |g>)/sqrt2)^N, then descend with J_y - i J_z.
  const HilbertLayout spin_only(n_qubits, 2);
  const OperatorSet ops = make_operator_set(spin_only, SpinSector::full);
  Vector v = Vector::Constant(spin_dim, std::pow(0.5, 0.5 * n_qubits));
  const int steps = twice(j - m) / 2;
  double current = j;
  for (int k = 0; k < steps; ++k) {
    // Work on the spin register by embedding with the boson vacuum.
    Vector full = Vector::Zero(spin_only.dim());
    for (Index s = 0; s < spin_dim; ++s) full(spin_only.index(s, 0)) = v(s);
    const Vector lowered = ops.jy * full - kI * (ops.jz * full);
    const double coeff = std::sqrt(j * (j + 1.0) - current * (current - 1.0));
    for (Index s = 0; s < spin_dim; ++s) v(s) = lowered(spin_only.index(s, 0)) / coeff;
    current -= 1.0;
  }
  return v;
}

StateVector collective_state(const HilbertLayout& layout, double j, double m, QuantizationAxis axis) {
  if (std::abs(j - 0.5 * layout.n_qubits()) > 1e-12) {
    throw std::invalid_argument("collective_state: only the maximal multiplet j = N/2 is supported");
  }
  const Vector spin = collective_spin_vector(layout.n_qubits(), m, axis);
  return product_state(layout, spin, fock_vector(layout.fock_dim(), 0));
}

std::vector<Complex> zbasis_to_xbasis_coefficients(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("zbasis_to_xbasis_coefficients: n_qubits must be >= 1");
  const Vector ground = collective_spin_vector(n_qubits, -0.5 * n_qubits, QuantizationAxis::z);
  std::vector<Complex> coeffs;
  coeffs.reserve(n_qubits + 1);
  for (int k = 0; k <= n_qubits; ++k) {
    const double m = -0.5 * n_qubits + k;
    coeffs.push_back(collective_spin_vector(n_qubits, m, QuantizationAxis::x).dot(ground));
  }
  return coeffs;
}

// ------------------------------------------------------------- boson states

Matrix boson_displacement(int fock_dim, Complex beta) {
  if (fock_dim < 2) throw std::invalid_argument("boson_displacement: fock_dim must be >= 2");
  const Matrix a = boson_annihilation(fock_dim);
  // beta a^dag - beta^* a = -i K with K = i (beta a^dag - beta^* a) Hermitian.
  const Matrix k = kI * (beta * a.adjoint() - std::conj(beta) * a);
  return linalg::expm_hermitian(k, -kI);
}

Vector coherent_vector(int fock_dim, Complex alpha) {
  return boson_displacement(fock_dim, alpha).col(0);
}

double cat_normalization(Complex alpha, CatParity parity) {
  const double overlap = std::exp(-2.0 * std::norm(alpha));
  const double base = parity == CatParity::even ? 1.0 + overlap : 1.0 - overlap;
  return 1.0 / std::sqrt(2.0 * base);
}

Vector cat_vector(int fock_dim, Complex alpha, CatParity parity) {
  if (parity == CatParity::odd && std::abs(alpha) == 0.0) {
    throw std::invalid_argument("cat_vector: the odd cat state at alpha = 0 is the zero vector");
  }
  const double sign = parity == CatParity::even ? 1.0 : -1.0;
  const Vector sum = coherent_vector(fock_dim, alpha) + sign * coherent_vector(fock_dim, -alpha);
  return sum / sum.norm();
}

Operator displacement_operator(const HilbertLayout& layout, Complex beta) {
  if (std::norm(beta) > 0.25 * layout.fock_dim()) {
    std::ostringstream msg;
    msg << "displacement_operator: |beta|^2 = " << std::norm(beta) << " exceeds fock_dim/4 = "
        << 0.25 * layout.fock_dim() << "; truncation error may be significant";
    warn(msg.str());
  }
  const Matrix d = boson_displacement(layout.fock_dim(), beta);
  return {layout, linalg::kron(Matrix::Identity(layout.spin_dim(), layout.spin_dim()), d)};
}

StateVector cat_state(const HilbertLayout& layout, Complex alpha, CatParity parity, const Vector& spin) {
  Vector spin_state = spin;
  if (spin_state.size() == 0) {
    spin_state = Vector::Zero(layout.spin_dim());
    spin_state(layout.ground_spin_index()) = 1.0;
  }
  return product_state(layout, spin_state, cat_vector(layout.fock_dim(), alpha, parity));
}

StateVector product_state(const HilbertLayout& layout, const Vector& spin, const Vector& boson) {
  if (spin.size() != layout.spin_dim() || boson.size() != layout.fock_dim()) {
    throw std::invalid_argument("product_state: factor dimensions do not match layout");
  }
  Vector v(layout.dim());
  for (Index s = 0; s < layout.spin_dim(); ++s) v.segment(s * layout.fock_dim(), layout.fock_dim()) = spin(s) * boson;
  return {layout, v};
}

Vector fock_vector(int fock_dim, int n) {
  if (n < 0 || n >= fock_dim) throw std::invalid_argument("fock_vector: photon number outside truncation");
  Vector v = Vector::Zero(fock_dim);
  v(n) = 1.0;
  return v;
}

}  // namespace cqrabi
