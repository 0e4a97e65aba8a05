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

/// Scalar time dependence of one operator term.
struct Modulation {
  enum class Kind { constant, cosine, exponential };
  Kind kind = Kind::constant;
  Complex amplitude = 1.0;
  double frequency = 0.0;  // rad/s

  static Modulation constant(Complex amplitude) { return {Kind::constant, amplitude, 0.0}; }
  /// amplitude * cos(frequency * t)
  static Modulation cosine(Complex amplitude, double frequency) { return {Kind::cosine, amplitude, frequency}; }
  /// amplitude * exp(i * frequency * t)
  static Modulation exponential(Complex amplitude, double frequency) {
    return {Kind::exponential, amplitude, frequency};
  }

  Complex value(double t) const;
};

/// H(t) = sum_k c_k(t) O_k with sparse O_k and scalar modulations c_k.
///
/// This is the propagation currency: applying H(t) to a vector or a dense
/// matrix costs one sparse product per non-constant term plus one for the
/// merged constant part.
class TimeDependentOperator {
 public:
  explicit TimeDependentOperator(Index dim) : dim_(dim) {}

  TimeDependentOperator& add(SparseMatrix op, Modulation modulation);
  TimeDependentOperator& add_constant(const SparseMatrix& op, Complex amplitude = 1.0) {
    return add(op, Modulation::constant(amplitude));
  }

  Index dim() const { return dim_; }
  bool is_constant() const;
  /// Largest |frequency| among non-constant terms.
  double max_frequency() const;
  /// Upper bound on the spectral radius of H(t), valid for all t.
  double norm_bound() const;

  SparseMatrix sparse_at(double t) const;
  Matrix dense_at(double t) const;

  /// y = factor * H(t) x (accumulate adds to y instead of overwriting).
  void apply(double t, const Vector& x, Vector& y, Complex factor = 1.0, bool accumulate = false) const;
  void apply(double t, const Matrix& x, Matrix& y, Complex factor = 1.0, bool accumulate = false) const;

  /// The same terms with every sparse factor replaced by map(O_k); the
  /// modulations are kept (used to map between bases).
  template <class F>
  TimeDependentOperator transformed(F&& map) const {
    TimeDependentOperator out(dim_);
    if (has_constant_) out.add_constant(map(constant_));
    for (const auto& term : terms_) out.add(map(term.op), term.modulation);
    return out;
  }

 private:
  struct Term {
    SparseMatrix op;
    Modulation modulation;
  };
  Index dim_;
  SparseMatrix constant_;
  bool has_constant_ = false;
  std::vector<Term> terms_;  // non-constant terms
};

}  // namespace cqrabi
