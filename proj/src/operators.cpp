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

#include "cqrabi/operators.hpp"

#include <bit>
#include <cmath>

namespace cqrabi {

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

SparseMatrix from_triplets(Index dim, const Triplets& t) {
  SparseMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Bit (n_qubits - 1 - q) of a spin index belongs to qubit q; 0 = |e>, 1 = |g>.
Index qubit_mask(int n_qubits, int qubit) { return Index{1} << (n_qubits - 1 - qubit); }

void fill_boson(OperatorSet& ops, Index spin_states) {
  const int f = ops.layout.fock_dim();
  Triplets ta, tn, tid;
  for (Index s = 0; s < spin_states; ++s) {
    for (int n = 0; n < f; ++n) {
      const Index i = s * f + n;
      tid.emplace_back(i, i, 1.0);
      if (n > 0) {
        ta.emplace_back(i - 1, i, std::sqrt(static_cast<double>(n)));
        tn.emplace_back(i, i, static_cast<double>(n));
      }
    }
  }
  ops.identity = from_triplets(ops.dim, tid);
  ops.a = from_triplets(ops.dim, ta);
  ops.adag = SparseMatrix(ops.a.adjoint());
  ops.n = from_triplets(ops.dim, tn);
}

void finish_spin(OperatorSet& ops) {
  ops.jm = SparseMatrix(ops.jp.adjoint());
  ops.jx = 0.5 * (ops.jp + ops.jm);
  ops.jy = Complex(0.0, -0.5) * (ops.jp - ops.jm);
  ops.jx.makeCompressed();
  ops.jy.makeCompressed();
}

}  // namespace

OperatorSet make_operator_set(const HilbertLayout& layout, SpinSector sector) {
  const int nq = layout.n_qubits();
  const int f = layout.fock_dim();
  OperatorSet ops{layout, sector, 0, {}, {}, {}, {}, {}, {}, {}, {}, {}};

  if (sector == SpinSector::full) {
    ops.dim = layout.dim();
    fill_boson(ops, layout.spin_dim());
    Triplets tz, tp;
    for (Index s = 0; s < layout.spin_dim(); ++s) {
      const int ground = std::popcount(static_cast<unsigned long long>(s));
      const double m = 0.5 * (nq - ground) - 0.5 * ground;
      for (int n = 0; n < f; ++n) {
        const Index i = layout.index(s, n);
        if (m != 0.0) tz.emplace_back(i, i, m);
        for (int q = 0; q < nq; ++q) {
          const Index mask = qubit_mask(nq, q);
          if (s & mask) tp.emplace_back(layout.index(s & ~mask, n), i, 1.0);
        }
      }
    }
    ops.jz = from_triplets(ops.dim, tz);
    ops.jp = from_triplets(ops.dim, tp);
  } else {
    ops.dim = static_cast<Index>(nq + 1) * f;
    fill_boson(ops, nq + 1);
    const double j = 0.5 * nq;
    Triplets tz, tp;
    for (int k = 0; k <= nq; ++k) {
      const double m = -j + k;
      for (int n = 0; n < f; ++n) {
        const Index i = static_cast<Index>(k) * f + n;
        if (m != 0.0) tz.emplace_back(i, i, m);
        if (k < nq) tp.emplace_back(i + f, i, std::sqrt(j * (j + 1.0) - m * (m + 1.0)));
      }
    }
    ops.jz = from_triplets(ops.dim, tz);
    ops.jp = from_triplets(ops.dim, tp);
  }
  finish_spin(ops);
  return ops;
}

SparseMatrix symmetric_embedding(const HilbertLayout& layout) {
  const int nq = layout.n_qubits();
  const int f = layout.fock_dim();
  std::vector<int> counts(nq + 1, 0);
  for (Index s = 0; s < layout.spin_dim(); ++s) {
    ++counts[nq - std::popcount(static_cast<unsigned long long>(s))];
  }
  Triplets t;
  for (Index s = 0; s < layout.spin_dim(); ++s) {
    const int k = nq - std::popcount(static_cast<unsigned long long>(s));  // excitations = m + N/2
    const double w = 1.0 / std::sqrt(static_cast<double>(counts[k]));
    for (int n = 0; n < f; ++n) t.emplace_back(layout.index(s, n), static_cast<Index>(k) * f + n, w);
  }
  SparseMatrix v(layout.dim(), static_cast<Index>(nq + 1) * f);
  v.setFromTriplets(t.begin(), t.end());
  v.makeCompressed();
  return v;
}

SparseMatrix single_qubit_operator(const HilbertLayout& layout, int qubit, const Eigen::Matrix2cd& op) {
  const int nq = layout.n_qubits();
  if (qubit < 0 || qubit >= nq) throw std::invalid_argument("single_qubit_operator: qubit index out of range");
  const Index mask = qubit_mask(nq, qubit);
  Triplets t;
  for (Index s = 0; s < layout.spin_dim(); ++s) {
    const int bit = (s & mask) ? 1 : 0;
    for (int out = 0; out < 2; ++out) {
      const Complex c = op(out, bit);
      if (c == Complex(0.0)) continue;
      const Index s_out = out ? (s | mask) : (s & ~mask);
      for (int n = 0; n < layout.fock_dim(); ++n) t.emplace_back(layout.index(s_out, n), layout.index(s, n), c);
    }
  }
  return from_triplets(layout.dim(), t);
}

SparseMatrix sigma_minus(const HilbertLayout& layout, int qubit) {
  Eigen::Matrix2cd lower;
  lower << 0.0, 0.0, 1.0, 0.0;  // |g><e| in the (|e>, |g>) basis
  return single_qubit_operator(layout, qubit, lower);
}

double symmetric_leakage(const HilbertLayout& layout, const Vector& psi) {
  const SparseMatrix v = symmetric_embedding(layout);
  const Vector reduced = v.adjoint() * psi;
  return (psi - v * reduced).norm();
}

}  // namespace cqrabi
