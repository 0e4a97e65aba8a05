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

#include "cqrabi/types.hpp"

namespace cqrabi::linalg {

/// General matrix exponential (Pade approximant with scaling and squaring).
Matrix expm(const Matrix& a);

/// exp(factor * h) for Hermitian h, evaluated through its eigendecomposition.
/// With a purely imaginary factor the result is unitary to rounding.
Matrix expm_hermitian(const Matrix& h, Complex factor);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// ||a - a^dag||_F / max(1, ||a||_F).
double hermiticity_error(const Matrix& a);

/// ||u^dag u - 1||_F.
double unitarity_error(const Matrix& u);

/// [a, b] = ab - ba.
Matrix commutator(const Matrix& a, const Matrix& b);

/// Kronecker product of two dense matrices.
Matrix kron(const Matrix& a, const Matrix& b);

/// Trace over the second factor of a (d1*d2) x (d1*d2) matrix.
Matrix partial_trace_second(const Matrix& rho, Index d1, Index d2);

/// Smallest eigenvalue of the Hermitian part of a.
double min_hermitian_eigenvalue(const Matrix& a);

}  // namespace cqrabi::linalg
