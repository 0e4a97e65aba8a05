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

// Brute-force reference constructions shared by the unit tests. They are
// deliberately built from explicit Kronecker products and index loops so
// that they do not share code paths with the library.

#pragma once

#include <cmath>
#include <random>

#include "cqrabi/types.hpp"

namespace oracle {

using cqrabi::Complex;
using cqrabi::Index;
using cqrabi::Matrix;
using cqrabi::Vector;

// Single-qubit basis order is (|e>, |g>).
inline Matrix pauli(char which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case 'x': m(0, 1) = m(1, 0) = 1.0; break;
    case 'y': m(0, 1) = Complex(0, -1); m(1, 0) = Complex(0, 1); break;
    case 'z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: m = Matrix::Identity(2, 2);
  }
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// op acting on qubit q of n (qubit 0 most significant), identity elsewhere.
inline Matrix on_qubit(int n, int q, const Matrix& op) {
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == q ? op : Matrix::Identity(2, 2));
  return out;
}

// Collective J_axis on the 2^n spin register.
inline Matrix spin_j(int n, char axis) {
  const Index d = Index{1} << n;
  Matrix out = Matrix::Zero(d, d);
  for (int q = 0; q < n; ++q) out += 0.5 * on_qubit(n, q, pauli(axis));
  return out;
}

inline Matrix annihilation(int f) {
  Matrix a = Matrix::Zero(f, f);
  for (int k = 1; k < f; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

inline Vector coherent(int f, Complex alpha) {
  Vector v(f);
  double log_fact = 0.0;
  for (int k = 0; k < f; ++k) {
    if (k > 0) log_fact += std::log(double(k));
    v(k) = std::exp(-0.5 * std::norm(alpha) - 0.5 * log_fact) * std::pow(alpha, k);
  }
  return v;
}

// Exponential by eigen-decomposition of a Hermitian generator: exp(c H).
inline Matrix exp_hermitian(const Matrix& h, Complex c) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(es.eigenvalues().size());
  for (Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(c * es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix random_hermitian(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return 0.5 * (a + a.adjoint());
}

inline Matrix random_unitary(Index d, std::mt19937_64& rng) {
  return exp_hermitian(random_hermitian(d, rng), Complex(0, 1));
}

inline Vector random_state(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

}  // namespace oracle
