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


#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cqrabi/linalg.hpp"
#include "cqrabi/metrics.hpp"
#include "oracles.hpp"

using namespace cqrabi;
using Catch::Approx;

namespace {

// Linear entropy of an operator straight from the four-index definition.
double entropy_by_loops(const Matrix& u, Index d) {
  Matrix r(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l) r(i * d + j, k * d + l) = u(i * d + k, j * d + l);
  Complex tr = 0.0;
  const Matrix rr = r * r.adjoint();
  for (Index a = 0; a < d * d; ++a)
    for (Index b = 0; b < d * d; ++b) tr += rr(a, b) * rr(b, a);
  return 1.0 - tr.real() / std::pow(double(d), 4);
}

Matrix unitary_channel(const Matrix& v, const Matrix& w) { return v * w * v.adjoint(); }

}  // namespace

TEST_CASE("state fidelity", "[metrics]") {
  std::mt19937_64 rng(1);
  const Vector a = oracle::random_state(6, rng);
  const Vector b = oracle::random_state(6, rng);
  CHECK(state_fidelity(a, a) == Approx(1.0).epsilon(1e-14));
  Vector e0 = Vector::Zero(6), e1 = Vector::Zero(6);
  e0(0) = 1.0;
  e1(1) = 1.0;
  CHECK(state_fidelity(e0, e1) == 0.0);
  CHECK(state_fidelity(Matrix(Matrix::Identity(6, 6) / 6.0), a) == Approx(1.0 / 6.0).epsilon(1e-14));
  const Matrix mixed = 0.5 * a * a.adjoint() + 0.5 * b * b.adjoint();
  const double f = state_fidelity(mixed, a);
  CHECK(f >= 0.0);
  CHECK(f <= 1.0 + 1e-10);
  CHECK(f == Approx(0.5 + 0.5 * std::norm(a.dot(b))).epsilon(1e-12));
  CHECK(state_fidelity(Matrix(a * a.adjoint()), a) == Approx(1.0).epsilon(1e-12));

  const HilbertLayout layout(1, 3);
  CHECK_THROWS_AS(state_fidelity(StateVector(layout, a), StateVector(HilbertLayout(1, 4), Vector::Zero(8))),
                  std::invalid_argument);
}

TEST_CASE("operator rearrangement", "[metrics]") {
  std::mt19937_64 rng(2);
  const Matrix u = oracle::random_unitary(4, rng);
  CHECK(rearrange(rearrange(u)) == u);

  // Identity: outer product of vec(I) with itself.
  Vector vec_id = Vector::Zero(4);
  vec_id(0) = vec_id(3) = 1.0;
  CHECK((rearrange(Matrix::Identity(4, 4)) - vec_id * vec_id.transpose()).norm() == 0.0);

  // A product operator has a rank-one rearrangement.
  const Matrix a = oracle::random_unitary(2, rng), b = oracle::random_hermitian(2, rng);
  const RealVector sv = Eigen::JacobiSVD<Matrix>(rearrange(oracle::kron(a, b))).singularValues();
  CHECK(sv(0) > 0.1);
  CHECK(sv(1) < 1e-12);
  CHECK_THROWS_AS(rearrange(Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("entangling power", "[metrics]") {
  CHECK(entangling_power(Matrix::Identity(4, 4)) == Approx(0.0).margin(1e-14));
  CHECK(std::abs(entangling_power(cnot()) - 2.0 / 9.0) < 1e-12);
  CHECK(std::abs(entangling_power(xx_gate(kPi / 2.0)) - 2.0 / 9.0) < 1e-12);
  CHECK(entangling_power(swap_operator(2)) == Approx(0.0).margin(1e-14));

  for (int k = 0; k < 20; ++k) {
    const double phi = kPi * k / 19.0;
    const double s = std::sin(phi);
    CHECK(std::abs(entangling_power(xx_gate(phi)) - 2.0 / 9.0 * s * s) < 1e-10);
  }

  // The swap entropy is a constant of the formalism: 1 - 1/d^2.
  CHECK(std::abs(operator_linear_entropy(swap_operator(2)) - entropy_by_loops(swap_operator(2), 2)) < 1e-12);
  CHECK(operator_linear_entropy(swap_operator(2)) == Approx(0.75).epsilon(1e-14));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix u = oracle::random_unitary(4, rng);
    CHECK(std::abs(operator_linear_entropy(u) - entropy_by_loops(u, 2)) < 1e-12);
    const Matrix left = oracle::kron(oracle::random_unitary(2, rng), oracle::random_unitary(2, rng));
    const Matrix right = oracle::kron(oracle::random_unitary(2, rng), oracle::random_unitary(2, rng));
    const double ep = entangling_power(u);
    CHECK(ep >= -1e-12);
    CHECK(ep <= 2.0 / 9.0 + 1e-12);
    CHECK(std::abs(entangling_power(left * u * right) - ep) < 1e-10);
  }
  CHECK_THROWS_AS(entangling_power(2.0 * Matrix::Identity(4, 4)), std::invalid_argument);
}

TEST_CASE("process fidelity", "[metrics]") {
  const auto basis = pauli_basis(2);
  REQUIRE(basis.size() == 16);
  CHECK((basis[1] - oracle::kron(Matrix::Identity(2, 2), oracle::pauli('x'))).norm() == 0.0);
  CHECK((basis[4] - oracle::kron(oracle::pauli('x'), Matrix::Identity(2, 2))).norm() == 0.0);
  CHECK((basis[11] - oracle::kron(oracle::pauli('y'), oracle::pauli('z'))).norm() == 0.0);

  std::mt19937_64 rng(4);
  const Matrix u = oracle::random_unitary(4, rng);
  const Matrix v = oracle::random_unitary(4, rng);
  const Channel ideal = [&](const Matrix& w) { return unitary_channel(u, w); };
  const Channel other = [&](const Matrix& w) { return unitary_channel(v, w); };
  const Channel depolarize = [](const Matrix& w) -> Matrix { return w.trace() * Matrix::Identity(4, 4) / 4.0; };

  CHECK(std::abs(process_fidelity(ideal, u) - 1.0) < 1e-10);
  CHECK(std::abs(process_fidelity(depolarize, u) - 0.0625) < 1e-12);
  // Unitary channel: |Tr(U^dag V)|^2 / d^2.
  CHECK(std::abs(process_fidelity(other, u) - std::norm((u.adjoint() * v).trace()) / 16.0) < 1e-12);

  const double p = 0.3;
  const Channel mix = [&](const Matrix& w) -> Matrix { return p * other(w) + (1 - p) * depolarize(w); };
  CHECK(std::abs(process_fidelity(mix, u) - (p * process_fidelity(other, u) + (1 - p) * 0.0625)) < 1e-10);

  CHECK_THROWS_AS(process_fidelity(std::vector<Matrix>(3, Matrix::Identity(4, 4)), u), std::invalid_argument);
}

TEST_CASE("global phase alignment and CNOT equivalence", "[metrics]") {
  std::mt19937_64 rng(5);
  const Matrix b = oracle::random_unitary(4, rng);
  const PhaseAlignment same = equal_up_to_global_phase(std::polar(1.0, 0.7) * b, b);
  CHECK(same.equal);
  CHECK(same.phase == Approx(0.7).epsilon(1e-12));
  CHECK(same.residual < 1e-14);

  const PhaseAlignment diff = equal_up_to_global_phase(Matrix::Identity(2, 2), oracle::pauli('x'));
  CHECK_FALSE(diff.equal);
  CHECK(diff.residual > 1.0);

  const LocalUnitaries lu = cnot_local_unitaries();
  for (const auto& m : {lu.u1, lu.u2, lu.u3, lu.u4}) CHECK(linalg::unitarity_error(Matrix(m)) < 1e-14);
  const Matrix corrected = oracle::kron(lu.u1, lu.u2) * xx_gate(kPi / 2.0) * oracle::kron(lu.u3, lu.u4);
  CHECK(equal_up_to_global_phase(corrected, cnot()).equal);

  const GateAnalysis g = analyze_gate(xx_gate(kPi / 2.0), {});
  CHECK(g.cnot_equivalent);
  CHECK(g.residual < 1e-8);
  CHECK(std::abs(g.entangling_power - 2.0 / 9.0) < 1e-12);
  CHECK(std::isnan(g.process_fidelity));

  const GateAnalysis weak = analyze_gate(xx_gate(kPi / 3.0), {});
  CHECK_FALSE(weak.cnot_equivalent);
}
