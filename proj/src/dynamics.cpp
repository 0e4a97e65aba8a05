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

#include "cqrabi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "cqrabi/linalg.hpp"
#include "cqrabi/operators.hpp"

namespace cqrabi {

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("time grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] >= grid[i - 1])) throw std::invalid_argument("time grid must be non-decreasing");
  }
}

std::int64_t substeps_for(double span, double hmax) {
  if (span <= 0.0) return 0;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / hmax - 1e-9)));
}

// One classical RK4 step of dy/dt = -i A(t) y for vectors or matrices.
template <class T, class Apply>
void rk4_step(const Apply& apply, double t, double h, T& y, T& k1, T& k2, T& k3, T& k4, T& tmp) {
  apply(t, y, k1);
  tmp = y + (0.5 * h) * k1;
  apply(t + 0.5 * h, tmp, k2);
  tmp = y + (0.5 * h) * k2;
  apply(t + 0.5 * h, tmp, k3);
  tmp = y + h * k3;
  apply(t + h, tmp, k4);
  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One step exp(dt A) y of dy/dt = A y for a time-independent linear A,
// summed until the terms fall below rounding.
template <class T, class Apply>
void taylor_step(const Apply& apply, double dt, T& y, T& term, T& next, T& acc) {
  acc = y;
  term = y;
  const double scale = y.norm();
  for (int k = 1; k <= 80; ++k) {
    apply(0.0, term, next);
    term = (dt / k) * next;
    acc += term;
    if (term.norm() <= 1e-17 * scale) break;
  }
  y.swap(acc);
}

// Taylor steps keep |A| dt at or below this.
constexpr double kTaylorReach = 2.0;

struct VectorRun {
  std::vector<Vector> states;
  double drift = 0.0;
  std::int64_t steps = 0;
};

VectorRun run_vector(const TimeDependentOperator& h, const Vector& psi0, const std::vector<double>& grid,
                     double hmax, bool renormalize) {
  VectorRun run;
  run.states.reserve(grid.size());
  Vector y = psi0;
  run.states.push_back(y);
  Vector k1, k2, k3, k4, tmp;
  const auto apply = [&h](double t, const Vector& x, Vector& out) { h.apply(t, x, out, Complex(0.0, -1.0)); };
  const bool constant = h.is_constant();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double span = grid[i + 1] - grid[i];
    const std::int64_t n = substeps_for(span, hmax);
    const double step = n > 0 ? span / static_cast<double>(n) : 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      if (constant) {
        taylor_step(apply, step, y, k1, k2, k3);
      } else {
        rk4_step(apply, grid[i] + static_cast<double>(j) * step, step, y, k1, k2, k3, k4, tmp);
      }
      if (renormalize) {
        const double nrm = y.norm();
        run.drift += std::abs(nrm - 1.0);
        y /= nrm;
      }
    }
    run.steps += n;
    run.states.push_back(y);
  }
  return run;
}

// Symmetric-sector helpers.
bool is_symmetric(const HilbertLayout& layout, const Vector& psi) {
  return symmetric_leakage(layout, psi) <= 1e-12 * std::max(1.0, psi.norm());
}

// L = L_c in the carrier frame: the jump operators only pick up phases.
struct Liouvillian {
  TimeDependentOperator heff;
  std::vector<SparseMatrix> jumps;
  mutable Matrix y, z, xd, lx, lxl;  // scratch

  void apply(double t, const Matrix& x, Matrix& out, bool hermitian) const {
    heff.apply(t, x, y, Complex(0.0, -1.0));
    if (hermitian) {
      out = y + y.adjoint();
    } else {
      xd = x.adjoint();
      heff.apply(t, xd, z, Complex(0.0, -1.0));
      out = y + z.adjoint();
    }
    for (const auto& l : jumps) {
      lx.setZero(x.rows(), x.cols());
      Eigen::internal::sparse_time_dense_product(l, x, lx, Complex(1.0));
      xd = lx.adjoint();
      lxl.setZero(x.rows(), x.cols());
      Eigen::internal::sparse_time_dense_product(l, xd, lxl, Complex(1.0));
      out += lxl.adjoint();
    }
  }
};

TimeDependentOperator with_decay(TimeDependentOperator h, const std::vector<SparseMatrix>& jumps) {
  for (const auto& l : jumps) h.add_constant(SparseMatrix(l.adjoint() * l), Complex(0.0, -0.5));
  return h;
}

Liouvillian carrier_liouvillian(const SystemParams& p, const HilbertLayout& layout, FullModel model) {
  const OperatorSet ops = make_operator_set(layout, SpinSector::full);
  auto jumps = jump_operators(p, layout);
  Liouvillian l{with_decay(carrier_frame_hamiltonian(p, ops, model), jumps), std::move(jumps), {}, {}, {}, {}, {}};
  return l;
}

// Row-sum bound of the Liouvillian as a linear map.
double liouvillian_bound(const Liouvillian& l) {
  double b = 2.0 * l.heff.norm_bound();
  for (const auto& j : l.jumps) {
    double rows = 0.0, cols = 0.0;
    RealVector col_sums = RealVector::Zero(j.cols());
    for (Index r = 0; r < j.outerSize(); ++r) {
      double acc = 0.0;
      for (SparseMatrix::InnerIterator it(j, r); it; ++it) {
        acc += std::abs(it.value());
        col_sums(it.col()) += std::abs(it.value());
      }
      rows = std::max(rows, acc);
    }
    cols = col_sums.size() > 0 ? col_sums.maxCoeff() : 0.0;
    b += rows * cols;
  }
  return b;
}

std::vector<Matrix> run_matrix(const Liouvillian& l, const Matrix& x0, const std::vector<double>& grid, double hmax,
                               bool hermitian, std::int64_t* steps) {
  std::vector<Matrix> out;
  out.reserve(grid.size());
  Matrix y = x0;
  out.push_back(y);
  Matrix k1, k2, k3, k4, tmp;
  const auto apply = [&l, hermitian](double t, const Matrix& x, Matrix& r) { l.apply(t, x, r, hermitian); };
  const bool constant = l.heff.is_constant();
  std::int64_t total = 0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double span = grid[i + 1] - grid[i];
    const std::int64_t n = substeps_for(span, hmax);
    const double step = n > 0 ? span / static_cast<double>(n) : 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      if (constant) {
        taylor_step(apply, step, y, k1, k2, k3);
      } else {
        rk4_step(apply, grid[i] + static_cast<double>(j) * step, step, y, k1, k2, k3, k4, tmp);
      }
    }
    if (hermitian) y = (0.5 * (y + y.adjoint())).eval();
    total += n;
    out.push_back(y);
  }
  if (steps) *steps = total;
  return out;
}

// Step for the master equation: Taylor reach for constant generators,
// otherwise half the Schroedinger bound.
double matrix_step(const Liouvillian& l, const IntegratorSettings& settings, double span) {
  double h = l.heff.is_constant() ? kTaylorReach / liouvillian_bound(l) : 0.5 * max_step(l.heff, settings);
  if (!std::isfinite(h) || !(h > 0.0)) h = std::max(span, 1e-300);
  return h;
}

Matrix to_frame(const RotatingFrame& frame, OutputFrame which, double t, const Matrix& rho_carrier) {
  return which == OutputFrame::rotating ? frame.drive_conjugate(t, rho_carrier)
                                        : frame.carrier_conjugate(t, rho_carrier);
}

Vector to_frame(const RotatingFrame& frame, OutputFrame which, double t, const Vector& psi_carrier) {
  return which == OutputFrame::rotating ? frame.drive_adjoint(t, psi_carrier) : frame.carrier_apply(t, psi_carrier);
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double pairwise_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace

// ---------------------------------------------------------------- Magnus

DisplacementPhase displacement_phase(const EffectiveParams& e, double t) {
  if (e.omega_r == 0.0) throw std::invalid_argument("displacement_phase: effective resonator frequency is zero");
  const double r = e.g / e.omega_r;
  DisplacementPhase d;
  d.beta = r * (1.0 - std::polar(1.0, e.omega_r * t));
  d.phi = r * r * (e.omega_r * t - std::sin(e.omega_r * t));
  return d;
}

Operator magnus_propagator(const EffectiveParams& e, const HilbertLayout& layout, double t) {
  if (e.epsilon != 0.0) {
    throw std::invalid_argument("magnus_propagator: the closed form requires zero effective qubit splitting");
  }
  const DisplacementPhase d = displacement_phase(e, t);
  const int nq = layout.n_qubits();
  const Index spin_dim = layout.spin_dim();
  Matrix jx = Matrix::Zero(spin_dim, spin_dim);
  for (Index s = 0; s < spin_dim; ++s) {
    for (int q = 0; q < nq; ++q) jx(s ^ (Index{1} << q), s) += 0.5;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(jx);
  // Group eigenvectors by eigenvalue m = -N/2 ... N/2.
  std::map<int, Matrix> projectors;
  for (Index k = 0; k < spin_dim; ++k) {
    const int twice_m = static_cast<int>(std::lround(2.0 * es.eigenvalues()(k)));
    const Vector v = es.eigenvectors().col(k);
    auto it = projectors.find(twice_m);
    if (it == projectors.end()) it = projectors.emplace(twice_m, Matrix::Zero(spin_dim, spin_dim)).first;
    it->second += v * v.adjoint();
  }
  Matrix u = Matrix::Zero(layout.dim(), layout.dim());
  for (const auto& [twice_m, proj] : projectors) {
    const double m = 0.5 * twice_m;
    const Matrix disp = boson_displacement(layout.fock_dim(), d.beta * m);
    u += std::polar(1.0, d.phi * m * m) * linalg::kron(proj, disp);
  }
  return {layout, u};
}

namespace {

// Midpoint product of exp(-i H dt) over `steps` steps starting at t0, applied to u in place.
void advance_ordered(const TimeDependentOperator& h, Matrix& u, double t0, double dt, std::int64_t steps) {
  const double bound = h.norm_bound() * std::abs(dt);
  Matrix term, next, acc;
  for (std::int64_t k = 0; k < steps; ++k) {
    const double tm = t0 + (static_cast<double>(k) + 0.5) * dt;
    if (bound > 0.5) {
      u = linalg::expm_hermitian(h.dense_at(tm), Complex(0.0, -dt)) * u;
      continue;
    }
    // Taylor series of exp(-i H dt) applied to the accumulated product.
    const SparseMatrix hk = h.sparse_at(tm);
    acc = u;
    term = u;
    const double scale = u.norm();
    for (int n = 1; n <= 60; ++n) {
      next.setZero(term.rows(), term.cols());
      Eigen::internal::sparse_time_dense_product(hk, term, next, Complex(0.0, -dt / n));
      term.swap(next);
      acc += term;
      if (term.norm() <= 1e-18 * scale) break;
    }
    u.swap(acc);
  }
}

}  // namespace

Operator time_ordered_oracle(const TimeDependentOperator& h, const HilbertLayout& layout, double t_final,
                             int steps) {
  if (steps < 1) throw std::invalid_argument("time_ordered_oracle: steps must be >= 1");
  if (h.dim() != layout.dim()) throw std::invalid_argument("time_ordered_oracle: dimension mismatch");
  Matrix u = Matrix::Identity(layout.dim(), layout.dim());
  advance_ordered(h, u, 0.0, t_final / steps, steps);
  return {layout, u};
}

std::vector<Matrix> time_ordered_columns(const TimeDependentOperator& h, const Matrix& x0,
                                         const std::vector<double>& times, double dt) {
  if (x0.rows() != h.dim()) throw std::invalid_argument("time_ordered_columns: dimension mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("time_ordered_columns: dt must be positive");
  std::vector<Matrix> out;
  Matrix u = x0;
  std::int64_t done = 0;
  for (double t : times) {
    const double k = t / dt;
    const auto target = static_cast<std::int64_t>(std::llround(k));
    if (std::abs(k - static_cast<double>(target)) > 1e-6 || target < done) {
      throw std::invalid_argument("time_ordered_columns: times must be increasing multiples of dt");
    }
    advance_ordered(h, u, static_cast<double>(done) * dt, dt, target - done);
    done = target;
    out.push_back(u);
  }
  return out;
}

std::vector<double> magnus_oracle_distance(const EffectiveParams& e, const HilbertLayout& layout,
                                           const std::vector<double>& times, int steps_per_period) {
  if (steps_per_period < 1) throw std::invalid_argument("magnus_oracle_distance: steps must be >= 1");
  const int f = layout.fock_dim();
  double reach = 0.0;
  for (double t : times) reach = std::max(reach, 0.5 * layout.n_qubits() * std::abs(displacement_phase(e, t).beta));
  // Room for the displaced tail of the highest compared Fock level.
  const int pad = 16 + static_cast<int>(std::ceil(3.0 * reach * (std::sqrt(double(f)) + reach)));
  const HilbertLayout wide(layout.n_qubits(), f + pad);
  const OperatorSet ops = make_operator_set(wide, SpinSector::full);
  Matrix columns = Matrix::Zero(wide.dim(), layout.dim());
  for (Index s = 0; s < layout.spin_dim(); ++s) {
    for (int n = 0; n < f; ++n) columns(wide.index(s, n), layout.index(s, n)) = 1.0;
  }
  const auto oracle = time_ordered_columns(interaction_picture_terms(e, ops), columns, times,
                                           e.period() / steps_per_period);
  std::vector<double> out;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Matrix magnus = magnus_propagator(e, wide, times[i]).matrix() * columns;
    out.push_back(linalg::spectral_norm(magnus - oracle[i]));
  }
  return out;
}

Operator time_ordered_oracle(const HamiltonianProvider& h, const HilbertLayout& layout, double t_final, int steps) {
  if (steps < 1) throw std::invalid_argument("time_ordered_oracle: steps must be >= 1");
  const double dt = t_final / steps;
  Matrix u = Matrix::Identity(layout.dim(), layout.dim());
  for (int k = 0; k < steps; ++k) {
    const Operator hk = h((k + 0.5) * dt);
    if (!(hk.layout() == layout)) throw std::invalid_argument("time_ordered_oracle: layout mismatch");
    u = linalg::expm_hermitian(hk.matrix(), Complex(0.0, -dt)) * u;
  }
  return {layout, u};
}

// ------------------------------------------------------------- integration

double max_step(const TimeDependentOperator& h, const IntegratorSettings& settings) {
  if (h.is_constant()) {
    const double floor = settings.min_frequency > 0.0 ? settings.step_fraction * kTwoPi / settings.min_frequency
                                                      : std::numeric_limits<double>::infinity();
    const double nb = h.norm_bound();
    return nb > 0.0 ? std::min(floor, kTaylorReach / nb) : floor;
  }
  const double w = std::max({h.max_frequency(), h.norm_bound(), settings.min_frequency});
  if (!(w > 0.0)) return std::numeric_limits<double>::infinity();
  return settings.step_fraction * kTwoPi / w;
}

std::vector<Vector> integrate_schrodinger(const TimeDependentOperator& h, const Vector& psi0,
                                          const std::vector<double>& grid, const IntegratorSettings& settings,
                                          IntegratorReport* report) {
  check_grid(grid);
  if (psi0.size() != h.dim()) throw std::invalid_argument("integrate_schrodinger: dimension mismatch");
  double hmax = max_step(h, settings);
  if (!std::isfinite(hmax)) hmax = std::max(grid.back() - grid.front(), 1e-300);
  for (int refinement = 0;; ++refinement) {
    VectorRun run = run_vector(h, psi0, grid, hmax, true);
    if (run.drift <= settings.drift_tolerance) {
      if (report) *report = {hmax, run.steps, run.drift, refinement};
      return std::move(run.states);
    }
    if (refinement >= settings.max_refinements) {
      std::ostringstream msg;
      msg << "norm drift " << run.drift << " exceeds " << settings.drift_tolerance << " after " << refinement
          << " step refinements (step " << hmax << " s)";
      throw NumericalBudgetError(msg.str());
    }
    hmax *= 0.5;
  }
}

Trajectory<StateVector> propagate_schrodinger(const TimeDependentOperator& h, const StateVector& psi0,
                                              const std::vector<double>& grid, const IntegratorSettings& settings) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("propagate_schrodinger: state not normalized");
  Trajectory<StateVector> traj;
  auto states = integrate_schrodinger(h, psi0.amplitudes(), grid, settings, &traj.integrator);
  traj.times = grid;
  for (auto& s : states) traj.states.emplace_back(psi0.layout(), std::move(s));
  return traj;
}

std::vector<Vector> propagate_constant(const SparseMatrix& h, const Vector& psi0, const std::vector<double>& grid) {
  check_grid(grid);
  if (psi0.size() != h.rows()) throw std::invalid_argument("propagate_constant: dimension mismatch");
  double bound = 0.0;
  for (Index r = 0; r < h.outerSize(); ++r) {
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(h, r); it; ++it) acc += std::abs(it.value());
    bound = std::max(bound, acc);
  }
  const auto apply = [&h](double, const Vector& x, Vector& y) {
    y.setZero(x.size());
    Eigen::internal::sparse_time_dense_product(h, x, y, Complex(0.0, -1.0));
  };
  std::vector<Vector> out;
  out.reserve(grid.size());
  Vector y = psi0;
  out.push_back(y);
  Vector term, next, acc;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double span = grid[i + 1] - grid[i];
    const std::int64_t n = bound > 0.0 ? substeps_for(span, kTaylorReach / bound) : (span > 0.0 ? 1 : 0);
    const double dt = n > 0 ? span / static_cast<double>(n) : 0.0;
    for (std::int64_t j = 0; j < n; ++j) taylor_step(apply, dt, y, term, next, acc);
    out.push_back(y);
  }
  return out;
}

void evolve_effective(const EffectiveParams& e, const HilbertLayout& layout, const Vector& psi0,
                      const std::vector<double>& grid, const StateVisitor& visit) {
  if (psi0.size() != layout.dim()) throw std::invalid_argument("evolve_effective: dimension mismatch");
  if (is_symmetric(layout, psi0)) {
    const OperatorSet ops = make_operator_set(layout, SpinSector::symmetric);
    const SparseMatrix v = symmetric_embedding(layout);
    const auto states = propagate_constant(effective_hamiltonian(e, ops), v.adjoint() * psi0, grid);
    for (std::size_t i = 0; i < states.size(); ++i) visit(i, v * states[i]);
  } else {
    const OperatorSet ops = make_operator_set(layout, SpinSector::full);
    const auto states = propagate_constant(effective_hamiltonian(e, ops), psi0, grid);
    for (std::size_t i = 0; i < states.size(); ++i) visit(i, states[i]);
  }
}

IntegratorReport evolve_closed(const SystemParams& p, const HilbertLayout& layout, const Vector& psi0,
                               const std::vector<double>& grid, FullModel model, const IntegratorSettings& settings,
                               OutputFrame frame, const StateVisitor& visit) {
  if (psi0.size() != layout.dim() || p.n_qubits != layout.n_qubits()) {
    throw std::invalid_argument("evolve_closed: layout mismatch");
  }
  check_grid(grid);
  IntegratorReport report;
  const RotatingFrame rf(p, layout);
  if (is_symmetric(layout, psi0)) {
    const OperatorSet ops = make_operator_set(layout, SpinSector::symmetric);
    const SparseMatrix v = symmetric_embedding(layout);
    const Vector reduced = v.adjoint() * psi0;
    const auto states =
        integrate_schrodinger(carrier_frame_hamiltonian(p, ops, model), reduced, grid, settings, &report);
    for (std::size_t i = 0; i < grid.size(); ++i) visit(i, to_frame(rf, frame, grid[i], Vector(v * states[i])));
  } else {
    const OperatorSet ops = make_operator_set(layout, SpinSector::full);
    const auto states =
        integrate_schrodinger(carrier_frame_hamiltonian(p, ops, model), psi0, grid, settings, &report);
    for (std::size_t i = 0; i < grid.size(); ++i) visit(i, to_frame(rf, frame, grid[i], states[i]));
  }
  return report;
}

Trajectory<StateVector> evolve_closed(const SystemParams& p, const HilbertLayout& layout, const StateVector& psi0,
                                      const std::vector<double>& grid, FullModel model,
                                      const IntegratorSettings& settings, OutputFrame frame) {
  if (!(psi0.layout() == layout)) throw std::invalid_argument("evolve_closed: layout mismatch");
  Trajectory<StateVector> traj;
  traj.times = grid;
  traj.integrator = evolve_closed(p, layout, psi0.amplitudes(), grid, model, settings, frame,
                                  [&](std::size_t, const Vector& psi) { traj.states.emplace_back(layout, psi); });
  return traj;
}

// ---------------------------------------------------------------- Lindblad

std::vector<SparseMatrix> jump_operators(const SystemParams& p, const HilbertLayout& layout) {
  std::vector<SparseMatrix> jumps;
  if (p.gamma > 0.0) {
    for (int q = 0; q < layout.n_qubits(); ++q) jumps.push_back(std::sqrt(p.gamma) * sigma_minus(layout, q));
  }
  if (p.kappa > 0.0) {
    const OperatorSet ops = make_operator_set(layout, SpinSector::full);
    jumps.push_back(std::sqrt(p.kappa) * ops.a);
  }
  return jumps;
}

Trajectory<DensityMatrix> lindblad_evolve(const SystemParams& p, const HilbertLayout& layout,
                                          const DensityMatrix& rho0, const std::vector<double>& grid,
                                          FullModel model, const IntegratorSettings& settings, OutputFrame frame) {
  if (!(rho0.layout() == layout) || p.n_qubits != layout.n_qubits()) {
    throw std::invalid_argument("lindblad_evolve: layout mismatch");
  }
  check_grid(grid);
  const Liouvillian l = carrier_liouvillian(p, layout, model);
  double hmax = matrix_step(l, settings, grid.back() - grid.front());
  Trajectory<DensityMatrix> traj;
  traj.times = grid;
  std::vector<Matrix> states;
  for (int refinement = 0;; ++refinement) {
    states = run_matrix(l, rho0.matrix(), grid, hmax, true, &traj.integrator.steps);
    traj.integrator.step = hmax;
    traj.integrator.refinements = refinement;
    traj.integrator.norm_drift = 0.0;
    double lowest = 0.0;
    for (const auto& rho : states) {
      const double drift = std::abs(rho.trace() - 1.0);
      traj.integrator.norm_drift = std::max(traj.integrator.norm_drift, drift);
      lowest = std::min(lowest, linalg::min_hermitian_eigenvalue(rho));
    }
    if (traj.integrator.norm_drift > 1e-6) throw NumericalBudgetError("lindblad_evolve: trace drift exceeds 1e-6");
    if (lowest >= -1e-8) break;
    if (refinement >= settings.max_refinements) {
      std::ostringstream msg;
      msg << "lindblad_evolve: density matrix lost positivity (eigenvalue " << lowest << ") after " << refinement
          << " step refinements";
      throw NumericalBudgetError(msg.str());
    }
    hmax *= 0.5;
  }
  const RotatingFrame rf(p, layout);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Matrix out = to_frame(rf, frame, grid[i], states[i]);
    out = (0.5 * (out + out.adjoint())).eval();
    out /= out.trace().real();
    traj.states.emplace_back(layout, std::move(out));
  }
  return traj;
}

Matrix lindblad_map(const SystemParams& p, const HilbertLayout& layout, const Matrix& x, double t_final,
                    FullModel model, const IntegratorSettings& settings, OutputFrame frame) {
  if (x.rows() != layout.dim() || x.cols() != layout.dim()) throw std::invalid_argument("lindblad_map: dimension mismatch");
  const Liouvillian l = carrier_liouvillian(p, layout, model);
  const double hmax = matrix_step(l, settings, t_final);
  const std::vector<double> grid{0.0, t_final};
  const Matrix herm = 0.5 * (x + x.adjoint());
  const Matrix anti = Complex(0.0, -0.5) * (x - x.adjoint());  // x = herm + i anti
  Matrix out = run_matrix(l, herm, grid, hmax, true, nullptr).back();
  if (anti.norm() > 0.0) out += kI * run_matrix(l, anti, grid, hmax, true, nullptr).back();
  const RotatingFrame rf(p, layout);
  return to_frame(rf, frame, t_final, out);
}

// -------------------------------------------------------------------- MCWF

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t z = master + (k + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Receives normalized trajectory states in the output frame. The shared
// no-jump state is reported once per grid point with the number of
// trajectories that have not jumped yet; jumped trajectories are reported
// individually in increasing trajectory index.
class McwfVisitor {
 public:
  virtual ~McwfVisitor() = default;
  virtual void shared(std::size_t index, std::int64_t alive, const Vector& psi) = 0;
  virtual void jumped(std::int64_t k, std::size_t index, const Vector& psi) = 0;
};

struct McwfStats {
  std::int64_t jumped_trajectories = 0;
  std::int64_t jumps = 0;
  IntegratorReport integrator;
};

McwfStats run_mcwf(const SystemParams& p, const HilbertLayout& layout, const StateVector& psi0,
                   const std::vector<double>& grid, FullModel model, const McwfSettings& settings,
                   OutputFrame frame, McwfVisitor& visitor) {
  if (!(psi0.layout() == layout) || p.n_qubits != layout.n_qubits()) {
    throw std::invalid_argument("mcwf: layout mismatch");
  }
  if (settings.trajectories < 1) throw std::invalid_argument("mcwf: trajectory count must be >= 1");
  check_grid(grid);
  const std::int64_t n_traj = settings.trajectories;

  const OperatorSet full_ops = make_operator_set(layout, SpinSector::full);
  const std::vector<SparseMatrix> jumps = jump_operators(p, layout);
  const TimeDependentOperator heff_full = with_decay(carrier_frame_hamiltonian(p, full_ops, model), jumps);

  // The shared no-jump path: symmetric sector when possible.
  const bool symmetric = is_symmetric(layout, psi0.amplitudes());
  SparseMatrix embed;
  TimeDependentOperator heff_shared(1);
  Vector psi;
  if (symmetric) {
    const OperatorSet sym = make_operator_set(layout, SpinSector::symmetric);
    embed = symmetric_embedding(layout);
    heff_shared = carrier_frame_hamiltonian(p, sym, model);
    SparseMatrix decay = p.gamma * (sym.jz + 0.5 * layout.n_qubits() * sym.identity) + p.kappa * sym.n;
    heff_shared.add_constant(decay, Complex(0.0, -0.5));
    psi = embed.adjoint() * psi0.amplitudes();
  } else {
    heff_shared = heff_full;
    psi = psi0.amplitudes();
  }
  const auto to_full = [&](const Vector& v) -> Vector { return symmetric ? Vector(embed * v) : v; };

  double hmax = std::min(max_step(heff_full, settings.integrator), max_step(heff_shared, settings.integrator));
  const double decay_rate = p.gamma * layout.n_qubits() + p.kappa * (layout.fock_dim() - 1);
  if (decay_rate > 0.0) hmax = std::min(hmax, 0.0999 / decay_rate);
  if (!std::isfinite(hmax)) hmax = std::max(grid.back() - grid.front(), 1e-300);

  std::vector<std::int64_t> substeps(grid.size(), 0);
  std::vector<double> steps(grid.size(), 0.0);
  McwfStats stats;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    substeps[i] = substeps_for(grid[i + 1] - grid[i], hmax);
    steps[i] = substeps[i] > 0 ? (grid[i + 1] - grid[i]) / static_cast<double>(substeps[i]) : 0.0;
    stats.integrator.steps += substeps[i];
  }
  stats.integrator.step = hmax;

  // First thresholds; a trajectory jumps when the no-jump norm^2 drops below it.
  std::vector<double> threshold(n_traj);
  for (std::int64_t k = 0; k < n_traj; ++k) {
    std::mt19937_64 rng(trajectory_seed(settings.seed, static_cast<std::uint64_t>(k)));
    threshold[k] = 1.0 - uniform(rng);
  }
  std::vector<std::int64_t> order(n_traj);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return threshold[a] > threshold[b]; });

  struct Spawn {
    std::int64_t k;
    std::size_t interval;
    std::int64_t done;  // substeps completed in `interval`
    Vector state;       // full basis, unnormalized, before the jump
  };
  std::vector<Spawn> spawns;
  std::size_t next = 0;

  const RotatingFrame rf(p, layout);
  const auto emit_shared = [&](std::size_t index, const Vector& v) {
    const Vector full = to_full(v);
    visitor.shared(index, n_traj - static_cast<std::int64_t>(next), to_frame(rf, frame, grid[index], Vector(full / full.norm())));
  };

  Vector k1, k2, k3, k4, tmp;
  const auto apply_shared = [&](double t, const Vector& x, Vector& out) {
    heff_shared.apply(t, x, out, Complex(0.0, -1.0));
  };
  emit_shared(0, psi);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    for (std::int64_t j = 0; j < substeps[i]; ++j) {
      if (heff_shared.is_constant()) {
        taylor_step(apply_shared, steps[i], psi, k1, k2, k3);
      } else {
        rk4_step(apply_shared, grid[i] + static_cast<double>(j) * steps[i], steps[i], psi, k1, k2, k3, k4, tmp);
      }
      const double weight = psi.squaredNorm();
      while (next < order.size() && threshold[order[next]] > weight) {
        spawns.push_back({order[next], i, j + 1, to_full(psi)});
        ++next;
      }
    }
    emit_shared(i + 1, psi);
  }

  // Continue every jumped trajectory with its own random stream.
  std::sort(spawns.begin(), spawns.end(), [](const Spawn& a, const Spawn& b) { return a.k < b.k; });
  stats.jumped_trajectories = static_cast<std::int64_t>(spawns.size());
  const auto apply_full = [&](double t, const Vector& x, Vector& out) {
    heff_full.apply(t, x, out, Complex(0.0, -1.0));
  };
  for (auto& s : spawns) {
    std::mt19937_64 rng(trajectory_seed(settings.seed, static_cast<std::uint64_t>(s.k)));
    uniform(rng);  // first threshold, already used
    Vector y = std::move(s.state);
    const auto jump = [&]() {
      std::vector<double> w(jumps.size());
      std::vector<Vector> out(jumps.size());
      double total = 0.0;
      for (std::size_t c = 0; c < jumps.size(); ++c) {
        out[c] = jumps[c] * y;
        w[c] = out[c].squaredNorm();
        total += w[c];
      }
      const double u = uniform(rng) * total;
      std::size_t pick = 0;
      double acc = w[0];
      while (pick + 1 < jumps.size() && acc <= u) acc += w[++pick];
      y = out[pick] / out[pick].norm();
      ++stats.jumps;
    };
    jump();
    double r = 1.0 - uniform(rng);
    std::size_t i = s.interval;
    std::int64_t j = s.done;
    for (; i + 1 < grid.size(); ++i, j = 0) {
      for (; j < substeps[i]; ++j) {
        if (heff_full.is_constant()) {
          taylor_step(apply_full, steps[i], y, k1, k2, k3);
        } else {
          rk4_step(apply_full, grid[i] + static_cast<double>(j) * steps[i], steps[i], y, k1, k2, k3, k4, tmp);
        }
        if (y.squaredNorm() < r) {
          jump();
          r = 1.0 - uniform(rng);
        }
      }
      visitor.jumped(s.k, i + 1, to_frame(rf, frame, grid[i + 1], Vector(y / y.norm())));
    }
  }
  return stats;
}

class ObservableVisitor : public McwfVisitor {
 public:
  ObservableVisitor(const std::vector<TrajectoryObservable>& obs, std::size_t grid_size)
      : obs_(obs), shared_(obs.size(), std::vector<double>(grid_size, 0.0)), alive_(grid_size, 0),
        jumped_(obs.size(), std::vector<std::vector<double>>(grid_size)) {}

  void shared(std::size_t index, std::int64_t alive, const Vector& psi) override {
    alive_[index] = alive;
    for (std::size_t o = 0; o < obs_.size(); ++o) shared_[o][index] = obs_[o](index, psi);
  }
  void jumped(std::int64_t, std::size_t index, const Vector& psi) override {
    for (std::size_t o = 0; o < obs_.size(); ++o) jumped_[o][index].push_back(obs_[o](index, psi));
  }

  void finish(std::int64_t n, McwfEstimate& est) const {
    est.mean.assign(obs_.size(), std::vector<double>(alive_.size()));
    est.std_error.assign(obs_.size(), std::vector<double>(alive_.size()));
    for (std::size_t o = 0; o < obs_.size(); ++o) {
      for (std::size_t i = 0; i < alive_.size(); ++i) {
        const auto& vals = jumped_[o][i];
        std::vector<double> sq(vals.size());
        for (std::size_t k = 0; k < vals.size(); ++k) sq[k] = vals[k] * vals[k];
        const double f = shared_[o][i];
        const double a = static_cast<double>(alive_[i]);
        const double sum = pairwise_sum(vals.data(), vals.size()) + a * f;
        const double sum2 = pairwise_sum(sq.data(), sq.size()) + a * f * f;
        const double nn = static_cast<double>(n);
        const double mean = sum / nn;
        est.mean[o][i] = mean;
        if (n > 1) {
          const double var = std::max(0.0, (sum2 / nn - mean * mean) * nn / (nn - 1.0));
          est.std_error[o][i] = std::sqrt(var / nn);
        }
      }
    }
  }

 private:
  const std::vector<TrajectoryObservable>& obs_;
  std::vector<std::vector<double>> shared_;
  std::vector<std::int64_t> alive_;
  std::vector<std::vector<std::vector<double>>> jumped_;  // [obs][grid] in trajectory order
};

class DensityVisitor : public McwfVisitor {
 public:
  DensityVisitor(Index dim, std::size_t grid_size) : rho_(grid_size, Matrix::Zero(dim, dim)) {}
  void shared(std::size_t index, std::int64_t alive, const Vector& psi) override {
    rho_[index] += static_cast<double>(alive) * (psi * psi.adjoint());
  }
  void jumped(std::int64_t, std::size_t index, const Vector& psi) override { rho_[index] += psi * psi.adjoint(); }
  std::vector<Matrix>& rho() { return rho_; }

 private:
  std::vector<Matrix> rho_;
};

}  // namespace

McwfEstimate mcwf_estimate(const SystemParams& p, const HilbertLayout& layout, const StateVector& psi0,
                           const std::vector<double>& grid, FullModel model, const McwfSettings& settings,
                           const std::vector<TrajectoryObservable>& observables, OutputFrame frame) {
  ObservableVisitor visitor(observables, grid.size());
  const McwfStats stats = run_mcwf(p, layout, psi0, grid, model, settings, frame, visitor);
  McwfEstimate est;
  visitor.finish(settings.trajectories, est);
  est.trajectories = settings.trajectories;
  est.jumped_trajectories = stats.jumped_trajectories;
  est.jumps = stats.jumps;
  est.integrator = stats.integrator;
  return est;
}

Trajectory<DensityMatrix> mcwf_evolve(const SystemParams& p, const HilbertLayout& layout, const StateVector& psi0,
                                      const std::vector<double>& grid, std::int64_t n_traj, std::uint64_t seed,
                                      FullModel model, const IntegratorSettings& settings, OutputFrame frame) {
  McwfSettings ms;
  ms.trajectories = n_traj;
  ms.seed = seed;
  ms.integrator = settings;
  DensityVisitor visitor(layout.dim(), grid.size());
  const McwfStats stats = run_mcwf(p, layout, psi0, grid, model, ms, frame, visitor);
  Trajectory<DensityMatrix> traj;
  traj.times = grid;
  traj.integrator = stats.integrator;
  traj.seed = seed;
  traj.trajectories = n_traj;
  for (auto& r : visitor.rho()) {
    r /= static_cast<double>(n_traj);
    r = (0.5 * (r + r.adjoint())).eval();
    traj.states.emplace_back(layout, std::move(r));
  }
  return traj;
}

// ------------------------------------------------------------------ frames

StateVector to_rotating_frame(const StateVector& psi, const Operator& u) {
  if (!(psi.layout() == u.layout())) throw std::invalid_argument("to_rotating_frame: layout mismatch");
  return {psi.layout(), u.matrix().adjoint() * psi.amplitudes()};
}

DensityMatrix to_rotating_frame(const DensityMatrix& rho, const Operator& u) {
  if (!(rho.layout() == u.layout())) throw std::invalid_argument("to_rotating_frame: layout mismatch");
  Matrix out = u.matrix().adjoint() * rho.matrix() * u.matrix();
  out = (0.5 * (out + out.adjoint())).eval();
  return {rho.layout(), out};
}

}  // namespace cqrabi
