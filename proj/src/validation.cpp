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

#include <cmath>
#include <random>

#include "cqrabi/cli.hpp"
#include "cqrabi/dynamics.hpp"
#include "cqrabi/linalg.hpp"
#include "cqrabi/metrics.hpp"
#include "cqrabi/operators.hpp"

namespace cqrabi {

namespace {

ValidationCheck check(std::string name, double error, double tolerance) {
  return {std::move(name), error, tolerance, error <= tolerance};
}

Vector random_state(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

Matrix random_unitary(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return Eigen::HouseholderQR<Matrix>(a).householderQ();
}

}  // namespace

std::vector<ValidationCheck> run_validation_suite() {
  std::vector<ValidationCheck> out;
  std::mt19937_64 rng(20260101);

  {
    const HilbertLayout layout(3, 3);
    const Matrix jx = collective_operator(layout, Axis::x).matrix();
    const Matrix jy = collective_operator(layout, Axis::y).matrix();
    const Matrix jz = collective_operator(layout, Axis::z).matrix();
    const Matrix jp = collective_operator(layout, Axis::plus).matrix();
    const Matrix j2 = collective_operator(layout, Axis::squared).matrix();
    double err = (linalg::commutator(jx, jy) - kI * jz).norm();
    err = std::max(err, (linalg::commutator(jy, jz) - kI * jx).norm());
    err = std::max(err, (linalg::commutator(jz, jx) - kI * jy).norm());
    out.push_back(check("su(2) commutators [J_a, J_b] = i eps_abc J_c", err, 1e-12));
    out.push_back(check("ladder operator J+ = J_x + i J_y", (jp - (jx + kI * jy)).norm(), 1e-12));
    out.push_back(check("Casimir J^2 = J_x^2 + J_y^2 + J_z^2", (j2 - (jx * jx + jy * jy + jz * jz)).norm(), 1e-12));
    double cas = 0.0;
    for (double m = -1.5; m <= 1.5; m += 1.0) {
      const Vector v = collective_state(layout, 1.5, m, QuantizationAxis::z).amplitudes();
      cas = std::max(cas, (j2 * v - 1.5 * 2.5 * v).norm());
      cas = std::max(cas, (jz * v - m * v).norm());
    }
    out.push_back(check("Dicke states are J^2, J_z eigenvectors", cas, 1e-12));
  }

  {
    const SystemParams p = SystemParams::reference(2);
    const HilbertLayout layout(2, 6);
    const RotatingFrame rf(p, layout);
    const Vector psi = random_state(layout.dim(), rng);
    double round = 0.0, dense = 0.0;
    for (double t : {0.0, 0.37e-9, 3.1e-9}) {
      round = std::max(round, (rf.adjoint_apply(t, rf.apply(t, psi)) - psi).norm());
      const Matrix u = rotating_frame_unitary(p, layout, t).matrix();
      dense = std::max(dense, (rf.adjoint_apply(t, psi) - u.adjoint() * psi).norm());
    }
    out.push_back(check("frame round trip U^dag U psi = psi", round, 1e-12));
    out.push_back(check("fast frame matches the dense frame unitary", dense, 1e-9));
  }

  {
    const int fd = 80;
    const Index block = 20;
    const Complex a(0.3, 0.2), b(-0.1, 0.4);
    const Matrix da = boson_displacement(fd, a), db = boson_displacement(fd, b);
    const Matrix dab = boson_displacement(fd, a + b);
    const Complex phase = std::polar(1.0, (a * std::conj(b)).imag());
    const double law = (da * db - phase * dab).topLeftCorner(block, block).norm();
    const double inverse =
        (da * boson_displacement(fd, -a) - Matrix::Identity(fd, fd)).topLeftCorner(block, block).norm();
    out.push_back(check("displacement group law D(a)D(b) = e^{i Im(a b*)} D(a+b)", law, 1e-10));
    out.push_back(check("displacement inverse D(a)D(-a) = I", inverse, 1e-10));
  }

  {
    const Matrix u = random_unitary(4, rng);
    out.push_back(check("rearrangement involution (U^R)^R = U", (rearrange(rearrange(u)) - u).norm(), 0.0));
  }

  {
    const SystemParams p = SystemParams::reference(2);
    const EffectiveParams e = effective_params(p);
    const double t = 0.5 * e.period();
    const double dist = magnus_oracle_distance(e, HilbertLayout(2, 12), {t}).front();
    out.push_back(check("Magnus propagator matches the time-ordered product", dist, 1e-6));
  }

  {
    double err = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double phi = kPi * k / 19.0;
      const double s = std::sin(phi);
      err = std::max(err, std::abs(entangling_power(xx_gate(phi)) - 2.0 / 9.0 * s * s));
    }
    out.push_back(check("entangling power closed form (2/9) sin^2 phi", err, 1e-10));
    out.push_back(check("entangling power of CNOT = 2/9", std::abs(entangling_power(cnot()) - 2.0 / 9.0), 1e-12));
    out.push_back(check("CNOT local equivalence at phi = pi/2", analyze_gate(xx_gate(kPi / 2.0), {}).residual, 1e-8));
  }

  {
    const Matrix u = xx_gate(kPi / 2.0);
    const Channel depolarize = [](const Matrix& w) -> Matrix { return w.trace() * Matrix::Identity(4, 4) / 4.0; };
    const Channel ideal = [&u](const Matrix& w) -> Matrix { return u * w * u.adjoint(); };
    out.push_back(check("process fidelity of the depolarizing channel = 1/16",
                        std::abs(process_fidelity(depolarize, u) - 1.0 / 16.0), 1e-12));
    out.push_back(check("process fidelity of the ideal channel = 1", std::abs(process_fidelity(ideal, u) - 1.0), 1e-10));
  }
  return out;
}

}  // namespace cqrabi
