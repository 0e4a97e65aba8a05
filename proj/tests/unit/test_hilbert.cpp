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

#include "cqrabi/hilbert.hpp"
#include "cqrabi/linalg.hpp"
#include "oracles.hpp"

using namespace cqrabi;
using Catch::Approx;

namespace {

Matrix with_boson_identity(const Matrix& spin, int fock_dim) {
  return oracle::kron(spin, Matrix::Identity(fock_dim, fock_dim));
}

}  // namespace

TEST_CASE("layout dimensions", "[hilbert]") {
  CHECK(build_layout(2, 10).dim() == 40);
  CHECK(build_layout(1, 2).dim() == 4);
  CHECK(build_layout(6, 25).dim() == 1600);
  CHECK(build_layout(3, 5).ground_spin_index() == 7);
  CHECK(build_layout(3, 5).index(2, 4) == 14);
  CHECK_THROWS_AS(build_layout(0, 10), std::invalid_argument);
  CHECK_THROWS_AS(build_layout(2, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_layout(-1, 4), std::invalid_argument);
}

TEST_CASE("collective operators match Kronecker-product sums", "[hilbert]") {
  for (int n = 1; n <= 3; ++n) {
    const HilbertLayout layout(n, 3);
    const Matrix jx = with_boson_identity(oracle::spin_j(n, 'x'), 3);
    const Matrix jy = with_boson_identity(oracle::spin_j(n, 'y'), 3);
    const Matrix jz = with_boson_identity(oracle::spin_j(n, 'z'), 3);
    CHECK((collective_operator(layout, Axis::x).matrix() - jx).norm() < 1e-14);
    CHECK((collective_operator(layout, Axis::y).matrix() - jy).norm() < 1e-14);
    CHECK((collective_operator(layout, Axis::z).matrix() - jz).norm() < 1e-14);
    CHECK((collective_operator(layout, Axis::plus).matrix() - (jx + kI * jy)).norm() < 1e-14);
    CHECK((collective_operator(layout, Axis::minus).matrix() - (jx - kI * jy)).norm() < 1e-14);
    CHECK((collective_operator(layout, Axis::squared).matrix() - (jx * jx + jy * jy + jz * jz)).norm() < 1e-13);
  }
}

TEST_CASE("collective operator spectra", "[hilbert]") {
  const int f = 4;
  {
    const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(collective_operator(HilbertLayout(1, f), Axis::z).matrix())
                              .eigenvalues();
    for (Index i = 0; i < f; ++i) CHECK(ev(i) == Approx(-0.5).margin(1e-14));
    for (Index i = f; i < 2 * f; ++i) CHECK(ev(i) == Approx(0.5).margin(1e-14));
  }
  {
    const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(collective_operator(HilbertLayout(2, f), Axis::x).matrix())
                              .eigenvalues();
    const double expected[] = {-1.0, 0.0, 0.0, 1.0};
    for (int k = 0; k < 4; ++k)
      for (Index i = 0; i < f; ++i) CHECK(ev(k * f + i) == Approx(expected[k]).margin(1e-13));
  }
}

TEST_CASE("su(2) structure relations", "[hilbert]") {
  for (int n : {1, 2, 4}) {
    const HilbertLayout layout(n, 2);
    const Matrix jx = collective_operator(layout, Axis::x).matrix();
    const Matrix jy = collective_operator(layout, Axis::y).matrix();
    const Matrix jz = collective_operator(layout, Axis::z).matrix();
    const Matrix j2 = collective_operator(layout, Axis::squared).matrix();
    CHECK((linalg::commutator(jx, jy) - kI * jz).norm() < 1e-12);
    CHECK((linalg::commutator(jy, jz) - kI * jx).norm() < 1e-12);
    CHECK((linalg::commutator(jz, jx) - kI * jy).norm() < 1e-12);
    CHECK(linalg::commutator(j2, jx).norm() < 1e-12);
    CHECK(linalg::commutator(j2, jz).norm() < 1e-12);
  }
}

TEST_CASE("ladder coefficients on the Dicke ladder", "[hilbert]") {
  const int n = 4;
  const double j = 2.0;
  const HilbertLayout layout(n, 2);
  const Matrix jp = collective_operator(layout, Axis::plus).matrix();
  const Matrix jm = collective_operator(layout, Axis::minus).matrix();
  for (double m = -j; m <= j + 1e-12; m += 1.0) {
    const Vector v = collective_state(layout, j, m, QuantizationAxis::z).amplitudes();
    if (m < j) {
      const Vector up = collective_state(layout, j, m + 1, QuantizationAxis::z).amplitudes();
      CHECK((jp * v - std::sqrt(j * (j + 1) - m * (m + 1)) * up).norm() < 1e-10);
    }
    if (m > -j) {
      const Vector down = collective_state(layout, j, m - 1, QuantizationAxis::z).amplitudes();
      CHECK((jm * v - std::sqrt(j * (j + 1) - m * (m - 1)) * down).norm() < 1e-10);
    }
  }
}

TEST_CASE("collective states", "[hilbert]") {
  SECTION("lowest weight is the product ground state") {
    const HilbertLayout layout(2, 3);
    const Vector v = collective_state(layout, 1.0, -1.0, QuantizationAxis::z).amplitudes();
    CHECK(std::abs(v(layout.index(3, 0)) - 1.0) < 1e-14);
    CHECK(v.norm() == Approx(1.0).epsilon(1e-14));
  }
  SECTION("single-spin x eigenvector fixed by the phase convention") {
    const HilbertLayout layout(1, 2);
    const Vector v = collective_state(layout, 0.5, 0.5, QuantizationAxis::x).amplitudes();
    CHECK(std::abs(v(layout.index(0, 0)) - M_SQRT1_2) < 1e-14);
    CHECK(std::abs(v(layout.index(1, 0)) - M_SQRT1_2) < 1e-14);
  }
  SECTION("eigenvector properties for both axes") {
    for (int n = 1; n <= 5; ++n) {
      const HilbertLayout layout(n, 2);
      const double j = 0.5 * n;
      const Matrix j2 = collective_operator(layout, Axis::squared).matrix();
      const Matrix jx = collective_operator(layout, Axis::x).matrix();
      const Matrix jz = collective_operator(layout, Axis::z).matrix();
      for (double m = -j; m <= j + 1e-12; m += 1.0) {
        for (auto axis : {QuantizationAxis::x, QuantizationAxis::z}) {
          const Vector v = collective_state(layout, j, m, axis).amplitudes();
          const Matrix& ja = axis == QuantizationAxis::x ? jx : jz;
          CHECK(std::abs(v.norm() - 1.0) < 1e-10);
          CHECK((j2 * v - j * (j + 1) * v).norm() < 1e-10);
          CHECK((ja * v - m * v).norm() < 1e-10);
        }
      }
    }
  }
  SECTION("x states have a real positive overlap with the lowered reference ladder") {
    // Reference ladder: |+>^N lowered by J_y - i J_z, built from Kronecker products.
    const int n = 3;
    const Matrix lower = oracle::spin_j(n, 'y') - kI * oracle::spin_j(n, 'z');
    Vector ref = Vector::Constant(8, std::pow(0.5, 1.5));
    for (double m = 1.5; m >= -1.5; m -= 1.0) {
      const Vector v = collective_spin_vector(n, m, QuantizationAxis::x);
      const Complex overlap = ref.normalized().dot(v);
      CHECK(std::abs(overlap.imag()) < 1e-12);
      CHECK(overlap.real() == Approx(1.0).epsilon(1e-12));
      ref = lower * ref;
    }
  }
  SECTION("invalid quantum numbers") {
    const HilbertLayout layout(2, 2);
    CHECK_THROWS_AS(collective_state(layout, 1.0, 1.5, QuantizationAxis::z), std::invalid_argument);
    CHECK_THROWS_AS(collective_state(layout, 1.0, 0.5, QuantizationAxis::x), std::invalid_argument);
    CHECK_THROWS_AS(collective_state(layout, 0.5, 0.5, QuantizationAxis::z), std::invalid_argument);
  }
}

TEST_CASE("z to x basis coefficients", "[hilbert]") {
  for (int n = 1; n <= 6; ++n) {
    const auto c = zbasis_to_xbasis_coefficients(n);
    REQUIRE(c.size() == static_cast<std::size_t>(n + 1));
    double total = 0.0;
    for (const auto& x : c) total += std::norm(x);
    CHECK(total == Approx(1.0).epsilon(1e-12));

    // Round trip |N/2,-N/2>_z = sum_M C_M |N/2,M>_x, and the companion expansion of |N/2,+N/2>_z.
    Vector down = Vector::Zero(Index{1} << n), up = Vector::Zero(Index{1} << n);
    for (int k = 0; k <= n; ++k) {
      const double m = -0.5 * n + k;
      const Vector x = collective_spin_vector(n, m, QuantizationAxis::x);
      down += c[k] * x;
      up += c[k] * ((n - k) % 2 == 0 ? 1.0 : -1.0) * x;
    }
    const Vector ground = collective_spin_vector(n, -0.5 * n, QuantizationAxis::z);
    const Vector excited = collective_spin_vector(n, 0.5 * n, QuantizationAxis::z);
    CHECK(1.0 - std::norm(ground.dot(down)) < 1e-12);
    CHECK(1.0 - std::norm(excited.dot(up)) < 1e-12);
  }
  const auto c1 = zbasis_to_xbasis_coefficients(1);
  CHECK(std::abs(c1[0]) == Approx(M_SQRT1_2).epsilon(1e-12));
  CHECK(std::abs(c1[1]) == Approx(M_SQRT1_2).epsilon(1e-12));
  const auto c2 = zbasis_to_xbasis_coefficients(2);
  CHECK(std::abs(c2[0]) == Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(c2[1]) == Approx(M_SQRT1_2).epsilon(1e-12));
  CHECK(std::abs(c2[2]) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("displacement operator", "[hilbert]") {
  const HilbertLayout layout(1, 40);
  CHECK((displacement_operator(layout, 0.0).matrix() - Matrix::Identity(80, 80)).norm() < 1e-14);

  const Complex beta(1.1, -0.7);
  const Matrix d = boson_displacement(40, beta);
  CHECK(linalg::unitarity_error(d) < 1e-10);

  // Coherent amplitudes from the series e^{-|b|^2/2} b^n / sqrt(n!).
  const Vector series = oracle::coherent(40, beta);
  CHECK((d.col(0) - series).norm() < 1e-8);
  const Matrix a = oracle::annihilation(40);
  const Vector c = d.col(0);
  CHECK(std::abs(c.dot(a.adjoint() * a * c).real() - std::norm(beta)) < 1e-8);

  const Matrix prod = (boson_displacement(40, beta) * boson_displacement(40, -beta)).topLeftCorner(15, 15);
  CHECK((prod - Matrix::Identity(15, 15)).norm() < 1e-10);

  // Acts as identity on the spin factor.
  const Matrix full = displacement_operator(layout, beta).matrix();
  CHECK((full - oracle::kron(Matrix::Identity(2, 2), d)).norm() < 1e-14);

  int warnings = 0;
  set_warning_handler([&](std::string_view) { ++warnings; });
  (void)displacement_operator(HilbertLayout(1, 8), Complex(2.0, 0.0));
  set_warning_handler(nullptr);
  CHECK(warnings == 1);
}

TEST_CASE("cat states", "[hilbert]") {
  const int f = 50;
  const HilbertLayout layout(1, f);
  const Vector vac = cat_vector(f, 0.0, CatParity::even);
  CHECK(std::abs(vac(0) - 1.0) < 1e-12);
  CHECK_THROWS_AS(cat_vector(f, 0.0, CatParity::odd), std::invalid_argument);

  for (Complex alpha : {Complex(0.3, 0.0), Complex(1.0, 0.5), Complex(-2.0, 1.0)}) {
    const Vector even = cat_vector(f, alpha, CatParity::even);
    const Vector odd = cat_vector(f, alpha, CatParity::odd);
    CHECK(std::abs(even.dot(odd)) < 1e-12);
    for (Index k = 1; k < f; k += 2) CHECK(std::abs(even(k)) < 1e-10);
    for (Index k = 0; k < f; k += 2) CHECK(std::abs(odd(k)) < 1e-10);

    // Closed-form normalization against the direct inner product of coherent vectors.
    const Vector p = oracle::coherent(f, alpha), m = oracle::coherent(f, -alpha);
    CHECK(std::abs((p + m).norm() - 1.0 / cat_normalization(alpha, CatParity::even)) < 1e-10);
    CHECK(std::abs((p - m).norm() - 1.0 / cat_normalization(alpha, CatParity::odd)) < 1e-10);
  }

  const StateVector s = cat_state(layout, Complex(1.0, 0.0), CatParity::odd);
  CHECK(s.norm() == Approx(1.0).epsilon(1e-12));
  CHECK(s.amplitudes().segment(0, f).norm() < 1e-14);  // spin defaults to |g>
}

TEST_CASE("state containers validate their invariants", "[hilbert]") {
  const HilbertLayout layout(1, 2);
  CHECK_THROWS_AS(StateVector(layout, Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(Operator(layout, Matrix::Zero(3, 3)), std::invalid_argument);
  Matrix bad = Matrix::Identity(4, 4) / 4.0;
  bad(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityMatrix(layout, bad), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix(layout, Matrix::Identity(4, 4)), std::invalid_argument);

  std::mt19937_64 rng(7);
  const StateVector psi(layout, oracle::random_state(4, rng));
  const DensityMatrix rho = DensityMatrix::pure(psi);
  CHECK(rho.purity() == Approx(1.0).epsilon(1e-12));
  CHECK(rho.min_eigenvalue() > -1e-12);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
}
