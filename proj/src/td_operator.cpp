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

#include "cqrabi/td_operator.hpp"

#include <cmath>

namespace cqrabi {

namespace {

// Maximum absolute row sum; bounds the spectral radius.
double row_sum_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (Index r = 0; r < m.outerSize(); ++r) {
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) acc += std::abs(it.value());
    best = std::max(best, acc);
  }
  return best;
}

}  // namespace

Complex Modulation::value(double t) const {
  switch (kind) {
    case Kind::constant:
      return amplitude;
    case Kind::cosine:
      return amplitude * std::cos(frequency * t);
    case Kind::exponential:
      return amplitude * std::polar(1.0, frequency * t);
  }
  return 0.0;
}

TimeDependentOperator& TimeDependentOperator::add(SparseMatrix op, Modulation modulation) {
  if (op.rows() != dim_ || op.cols() != dim_) throw std::invalid_argument("TimeDependentOperator: dimension mismatch");
  if (modulation.amplitude == Complex(0.0)) return *this;
  if (modulation.kind == Modulation::Kind::constant) {
    SparseMatrix scaled = modulation.amplitude * op;
    if (has_constant_) {
      constant_ = SparseMatrix(constant_ + scaled);
    } else {
      constant_ = std::move(scaled);
      has_constant_ = true;
    }
    constant_.prune(Complex(0.0));
    constant_.makeCompressed();
    return *this;
  }
  op.makeCompressed();
  terms_.push_back({std::move(op), modulation});
  return *this;
}

bool TimeDependentOperator::is_constant() const { return terms_.empty(); }

double TimeDependentOperator::max_frequency() const {
  double w = 0.0;
  for (const auto& term : terms_) w = std::max(w, std::abs(term.modulation.frequency));
  return w;
}

double TimeDependentOperator::norm_bound() const {
  double bound = has_constant_ ? row_sum_norm(constant_) : 0.0;
  for (const auto& term : terms_) bound += std::abs(term.modulation.amplitude) * row_sum_norm(term.op);
  return bound;
}

SparseMatrix TimeDependentOperator::sparse_at(double t) const {
  SparseMatrix out(dim_, dim_);
  if (has_constant_) out = constant_;
  for (const auto& term : terms_) out = SparseMatrix(out + term.modulation.value(t) * term.op);
  out.makeCompressed();
  return out;
}

Matrix TimeDependentOperator::dense_at(double t) const { return Matrix(sparse_at(t)); }

void TimeDependentOperator::apply(double t, const Vector& x, Vector& y, Complex factor, bool accumulate) const {
  if (!accumulate) y.setZero(dim_);
  if (has_constant_) Eigen::internal::sparse_time_dense_product(constant_, x, y, factor);
  for (const auto& term : terms_) {
    Eigen::internal::sparse_time_dense_product(term.op, x, y, factor * term.modulation.value(t));
  }
}

void TimeDependentOperator::apply(double t, const Matrix& x, Matrix& y, Complex factor, bool accumulate) const {
  if (!accumulate) y.setZero(dim_, x.cols());
  if (has_constant_) Eigen::internal::sparse_time_dense_product(constant_, x, y, factor);
  for (const auto& term : terms_) {
    Eigen::internal::sparse_time_dense_product(term.op, x, y, factor * term.modulation.value(t));
  }
}

}  // namespace cqrabi
