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

#include "cqrabi/model.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "cqrabi/linalg.hpp"

namespace cqrabi {

namespace {

void require_layout(const SystemParams& p, const HilbertLayout& layout) {
  if (p.n_qubits != layout.n_qubits()) {
    throw std::invalid_argument("layout has a different number of qubits than the parameters");
  }
}

// J_x on the 2^N spin register alone.
Matrix spin_jx(int n_qubits) {
  const Index dim = Index{1} << n_qubits;
  Matrix jx = Matrix::Zero(dim, dim);
  for (Index s = 0; s < dim; ++s) {
    for (int q = 0; q < n_qubits; ++q) jx(s ^ (Index{1} << q), s) += 0.5;
  }
  return jx;
}

double margin(double num, double den) {
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

RegimeCondition score(std::string name, double m) {
  RegimeCondition c;
  c.name = std::move(name);
  c.margin = m;
  c.pass = m >= kRegimeMarginAllowance;
  c.hard_fail = m < 1.0;
  return c;
}

}  // namespace

void SystemParams::validate() const {
  if (n_qubits < 1) throw ConfigError("n_qubits must be >= 1");
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be a positive frequency");
  };
  const auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be >= 0");
  };
  positive(omega_r, "omega_r");
  positive(epsilon, "epsilon");
  positive(omega_x, "omega_x");
  positive(omega_z, "omega_z");
  non_negative(g, "g");
  non_negative(Omega_x, "Omega_x");
  non_negative(Omega_z, "Omega_z");
  non_negative(gamma, "gamma");
  non_negative(kappa, "kappa");
}

SystemParams SystemParams::reference(int n_qubits) {
  SystemParams p;
  p.n_qubits = n_qubits;
  p.omega_r = kTwoPi * 10e9;
  p.epsilon = kTwoPi * 10e9;
  p.g = kTwoPi * 20e6;
  p.Omega_x = kTwoPi * 2e9;
  p.Omega_z = 0.0;
  p.omega_x = kTwoPi * 9.98e9;
  p.omega_z = kTwoPi * 1e9;
  p.gamma = kTwoPi * 0.05e6;
  p.kappa = kTwoPi * 0.012e6;
  return p;
}

double EffectiveParams::period() const {
  if (omega_r == 0.0) throw std::invalid_argument("effective period undefined for omega_r = 0");
  return kTwoPi / std::abs(omega_r);
}

EffectiveParams effective_params(const SystemParams& p) {
  if (p.omega_x == p.omega_r) {
    throw std::invalid_argument("effective_params: omega_x == omega_r makes the effective frame degenerate");
  }
  EffectiveParams e;
  e.omega_r = p.omega_r - p.omega_x;
  e.epsilon = 0.5 * p.Omega_z;
  e.g = 0.5 * p.g;
  e.ratio = e.g / e.omega_r;
  return e;
}

std::string RegimeReport::describe() const {
  std::ostringstream out;
  out.precision(6);
  for (const auto& c : conditions) {
    out << c.name << ": " << c.margin << (c.pass ? " ok" : (c.hard_fail ? " FAIL" : " weak")) << '\n';
  }
  out << "overall: " << (pass ? "pass" : (hard_fail ? "fail" : "warning")) << '\n';
  return out.str();
}

RegimeReport check_regime(const SystemParams& p) {
  RegimeReport r;
  {
    RegimeCondition c;
    c.name = "Omega_x = 2 omega_z (relative error)";
    const double scale = std::max(std::abs(p.Omega_x), std::abs(2.0 * p.omega_z));
    c.margin = scale == 0.0 ? 0.0 : std::abs(p.Omega_x - 2.0 * p.omega_z) / scale;
    c.pass = c.margin <= 1e-9;
    c.hard_fail = !c.pass;
    r.conditions.push_back(c);
  }
  r.conditions.push_back(score("omega_x / Omega_x", margin(p.omega_x, p.Omega_x)));
  r.conditions.push_back(score("Omega_x / g", margin(p.Omega_x, p.g)));
  r.conditions.push_back(score("omega_z / Omega_z", margin(p.omega_z, p.Omega_z)));
  r.conditions.push_back(score("omega_z / |epsilon - omega_x|", margin(p.omega_z, std::abs(p.epsilon - p.omega_x))));
  r.pass = true;
  r.hard_fail = false;
  for (const auto& c : r.conditions) {
    r.pass = r.pass && c.pass;
    r.hard_fail = r.hard_fail || c.hard_fail;
  }
  return r;
}

// ------------------------------------------------------------ Hamiltonians

TimeDependentOperator lab_hamiltonian(const SystemParams& p, const OperatorSet& ops) {
  TimeDependentOperator h(ops.dim);
  h.add_constant(ops.n, p.omega_r);
  h.add_constant(ops.jz, p.epsilon);
  h.add_constant(SparseMatrix((ops.a + ops.adag) * ops.jx), p.g);
  h.add(ops.jz, Modulation::cosine(p.Omega_z, p.omega_z));
  h.add(ops.jx, Modulation::cosine(p.Omega_x, p.omega_x));
  return h;
}

Operator full_hamiltonian(const SystemParams& p, const HilbertLayout& layout, double t) {
  require_layout(p, layout);
  const OperatorSet ops = make_operator_set(layout, SpinSector::full);
  return {layout, lab_hamiltonian(p, ops).dense_at(t)};
}

TimeDependentOperator carrier_frame_hamiltonian(const SystemParams& p, const OperatorSet& ops, FullModel model) {
  TimeDependentOperator h(ops.dim);
  h.add_constant(ops.n, p.omega_r - p.omega_x);
  h.add_constant(ops.jz, p.epsilon - p.omega_x);
  h.add_constant(ops.jx, 0.5 * p.Omega_x);
  h.add_constant(SparseMatrix(ops.a * ops.jp + ops.adag * ops.jm), 0.5 * p.g);
  h.add(ops.jz, Modulation::cosine(p.Omega_z, p.omega_z));
  if (model == FullModel::lab) {
    SparseMatrix c = 0.25 * p.Omega_x * ops.jp + 0.5 * p.g * SparseMatrix(ops.adag * ops.jp);
    c.prune(Complex(0.0));
    const SparseMatrix cd = c.adjoint();
    h.add(c, Modulation::exponential(1.0, 2.0 * p.omega_x));
    h.add(cd, Modulation::exponential(1.0, -2.0 * p.omega_x));
  }
  return h;
}

SparseMatrix effective_hamiltonian(const EffectiveParams& e, const OperatorSet& ops) {
  SparseMatrix h = e.omega_r * ops.n + e.epsilon * ops.jz + e.g * SparseMatrix((ops.a + ops.adag) * ops.jx);
  h.prune(Complex(0.0));
  h.makeCompressed();
  return h;
}

Operator effective_hamiltonian(const EffectiveParams& e, const HilbertLayout& layout) {
  const OperatorSet ops = make_operator_set(layout, SpinSector::full);
  return {layout, Matrix(effective_hamiltonian(e, ops))};
}

TimeDependentOperator interaction_picture_terms(const EffectiveParams& e, const OperatorSet& ops) {
  TimeDependentOperator h(ops.dim);
  const Complex c = 0.5 * e.g;
  h.add(SparseMatrix(ops.jp * ops.a), Modulation::exponential(c, e.epsilon - e.omega_r));
  h.add(SparseMatrix(ops.jp * ops.adag), Modulation::exponential(c, e.epsilon + e.omega_r));
  h.add(SparseMatrix(ops.jm * ops.a), Modulation::exponential(c, -e.epsilon - e.omega_r));
  h.add(SparseMatrix(ops.jm * ops.adag), Modulation::exponential(c, -e.epsilon + e.omega_r));
  return h;
}

Operator interaction_picture_hamiltonian(const EffectiveParams& e, const HilbertLayout& layout, double t) {
  const OperatorSet ops = make_operator_set(layout, SpinSector::full);
  return {layout, interaction_picture_terms(e, ops).dense_at(t)};
}

Operator parity_operator(const HilbertLayout& layout) {
  const int nq = layout.n_qubits();
  Matrix p = Matrix::Zero(layout.dim(), layout.dim());
  for (Index s = 0; s < layout.spin_dim(); ++s) {
    const int excited = nq - std::popcount(static_cast<unsigned long long>(s));
    for (int n = 0; n < layout.fock_dim(); ++n) {
      const Index i = layout.index(s, n);
      p(i, i) = ((excited + n) % 2 == 0) ? 1.0 : -1.0;
    }
  }
  return {layout, p};
}

// ------------------------------------------------------------------ frames

FrameUnitary::FrameUnitary(HilbertLayout layout, std::vector<Matrix> generators)
    : layout_(layout), generators_(std::move(generators)) {
  for (const auto& g : generators_) {
    if (g.rows() != layout_.dim() || g.cols() != layout_.dim()) {
      throw std::invalid_argument("FrameUnitary: generator dimension mismatch");
    }
  }
}

FrameUnitary FrameUnitary::identity(const HilbertLayout& layout) { return {layout, {}}; }

Operator FrameUnitary::at(double t) const {
  Matrix u = Matrix::Identity(layout_.dim(), layout_.dim());
  for (const auto& g : generators_) u = u * linalg::expm_hermitian(g, Complex(0.0, -t));
  return {layout_, u};
}

Operator FrameUnitary::generator_term(double t) const {
  const Index d = layout_.dim();
  Matrix out = Matrix::Zero(d, d);
  Matrix tail = Matrix::Identity(d, d);  // R_k, built from the right
  for (auto it = generators_.rbegin(); it != generators_.rend(); ++it) {
    out += tail.adjoint() * (*it) * tail;
    tail = linalg::expm_hermitian(*it, Complex(0.0, -t)) * tail;
  }
  return {layout_, out};
}

FrameUnitary rotating_frame(const SystemParams& p, const HilbertLayout& layout, FrameOrder order) {
  require_layout(p, layout);
  const OperatorSet ops = make_operator_set(layout, SpinSector::full);
  const Matrix carrier = p.omega_x * Matrix(ops.jz + ops.n);
  const Matrix drive = 0.5 * p.Omega_x * Matrix(ops.jx);
  if (order == FrameOrder::carrier_first) return {layout, {carrier, drive}};
  return {layout, {drive, carrier}};
}

Operator rotating_frame_unitary(const SystemParams& p, const HilbertLayout& layout, double t, FrameOrder order) {
  return rotating_frame(p, layout, order).at(t);
}

Operator transform_frame(const HamiltonianProvider& h, const FrameUnitary& u, double t) {
  const Operator ht = h(t);
  if (!(ht.layout() == u.layout())) throw std::invalid_argument("transform_frame: layout mismatch");
  const Matrix ut = u.at(t).matrix();
  Matrix out = ut.adjoint() * ht.matrix() * ut - u.generator_term(t).matrix();
  out = 0.5 * (out + out.adjoint()).eval();
  return {u.layout(), out};
}

RotatingFrame::RotatingFrame(const SystemParams& p, const HilbertLayout& layout)
    : layout_(layout), omega_x_(p.omega_x), half_drive_(0.5 * p.Omega_x), jx_spin_(spin_jx(layout.n_qubits())) {
  require_layout(p, layout);
  carrier_charges_.resize(layout.dim());
  const int nq = layout.n_qubits();
  for (Index s = 0; s < layout.spin_dim(); ++s) {
    const int ground = std::popcount(static_cast<unsigned long long>(s));
    const double m = 0.5 * (nq - ground) - 0.5 * ground;
    for (int n = 0; n < layout.fock_dim(); ++n) carrier_charges_(layout.index(s, n)) = m + n;
  }
}

Matrix RotatingFrame::spin_rotation(double t) const {
  const Vector phases = (Complex(0.0, -half_drive_ * t) * jx_spin_.eigenvalues().cast<Complex>()).array().exp();
  return jx_spin_.eigenvectors() * phases.asDiagonal() * jx_spin_.eigenvectors().adjoint();
}

Vector RotatingFrame::drive_adjoint(double t, const Vector& psi) const {
  if (psi.size() != layout_.dim()) throw std::invalid_argument("RotatingFrame: dimension mismatch");
  const Matrix r = spin_rotation(-t);  // exp(+i Omega_x/2 J_x t)
  Vector out(psi.size());
  Eigen::Map<const Matrix> in(psi.data(), layout_.fock_dim(), layout_.spin_dim());
  Eigen::Map<Matrix> res(out.data(), layout_.fock_dim(), layout_.spin_dim());
  res.noalias() = in * r.transpose();
  return out;
}

Matrix RotatingFrame::drive_conjugate(double t, const Matrix& rho) const {
  if (rho.rows() != layout_.dim() || rho.cols() != layout_.dim()) {
    throw std::invalid_argument("RotatingFrame: dimension mismatch");
  }
  const Matrix v = linalg::kron(spin_rotation(t), Matrix::Identity(layout_.fock_dim(), layout_.fock_dim()));
  return v.adjoint() * rho * v;
}

Vector RotatingFrame::adjoint_apply(double t, const Vector& psi) const {
  const Vector carrier = (Complex(0.0, omega_x_ * t) * carrier_charges_.cast<Complex>()).array().exp();
  return drive_adjoint(t, carrier.cwiseProduct(psi));
}

Vector RotatingFrame::apply(double t, const Vector& psi) const {
  if (psi.size() != layout_.dim()) throw std::invalid_argument("RotatingFrame: dimension mismatch");
  const Matrix r = spin_rotation(t);
  Vector rotated(psi.size());
  Eigen::Map<const Matrix> in(psi.data(), layout_.fock_dim(), layout_.spin_dim());
  Eigen::Map<Matrix> res(rotated.data(), layout_.fock_dim(), layout_.spin_dim());
  res.noalias() = in * r.transpose();
  return carrier_apply(t, rotated);
}

Vector RotatingFrame::carrier_apply(double t, const Vector& psi) const {
  if (psi.size() != layout_.dim()) throw std::invalid_argument("RotatingFrame: dimension mismatch");
  const Vector carrier = (Complex(0.0, -omega_x_ * t) * carrier_charges_.cast<Complex>()).array().exp();
  return carrier.cwiseProduct(psi);
}

Matrix RotatingFrame::carrier_conjugate(double t, const Matrix& rho) const {
  if (rho.rows() != layout_.dim() || rho.cols() != layout_.dim()) {
    throw std::invalid_argument("RotatingFrame: dimension mismatch");
  }
  const Vector carrier = (Complex(0.0, -omega_x_ * t) * carrier_charges_.cast<Complex>()).array().exp();
  return carrier.asDiagonal() * rho * carrier.conjugate().asDiagonal();
}

}  // namespace cqrabi
