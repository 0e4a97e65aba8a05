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

#include "cqrabi/hilbert.hpp"

namespace cqrabi {

/// Which basis a set of sparse operators is expressed in.
///
/// `full` is the 2^N * fock_dim tensor basis of HilbertLayout.
/// `symmetric` is the (N+1) * fock_dim basis |N/2, m>_z (x) |n>, index
/// (m + N/2) * fock_dim + n, the permutation-symmetric sector reached by
/// collective dynamics. It is used internally to accelerate closed-system
/// propagation of symmetric states; results are embedded back into the full
/// basis.
enum class SpinSector { full, symmetric };

/// Sparse collective and boson operators in one basis.
struct OperatorSet {
  HilbertLayout layout;
  SpinSector sector;
  Index dim;
  SparseMatrix identity;
  SparseMatrix a, adag, n;
  SparseMatrix jx, jy, jz, jp, jm;
};

OperatorSet make_operator_set(const HilbertLayout& layout, SpinSector sector);

/// Isometry (full dim) x ((N+1) * fock_dim) whose columns are the symmetric
/// basis states written in the full tensor basis.
SparseMatrix symmetric_embedding(const HilbertLayout& layout);

/// sigma^-_k = |g><e| on qubit k (0-based, qubit 0 most significant), full basis.
SparseMatrix sigma_minus(const HilbertLayout& layout, int qubit);

/// Single-qubit operator (2x2) on qubit k, identity elsewhere, full basis.
SparseMatrix single_qubit_operator(const HilbertLayout& layout, int qubit, const Eigen::Matrix2cd& op);

/// Norm of the component of a full-basis vector outside the symmetric sector.
double symmetric_leakage(const HilbertLayout& layout, const Vector& psi);

}  // namespace cqrabi
