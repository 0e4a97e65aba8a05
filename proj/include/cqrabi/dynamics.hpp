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

#include <cstdint>
#include <functional>
#include <vector>

#include "cqrabi/hilbert.hpp"
#include "cqrabi/model.hpp"
#include "cqrabi/td_operator.hpp"

namespace cqrabi {

struct DisplacementPhase {
  Complex beta;
  double phi = 0.0;
};

/// beta(t) = (g/w)(1 - e^{iwt}), phi(t) = (g/w)^2 (wt - sin wt) for the
/// effective parameters. Throws for w = 0.
DisplacementPhase displacement_phase(const EffectiveParams& e, double t);

/// D(beta(t) J_x) exp(i phi(t) J_x^2), the exact interaction-picture
/// propagator for zero effective splitting. Throws when e.epsilon != 0.
Operator magnus_propagator(const EffectiveParams& e, const HilbertLayout& layout, double t);

/// Ordered product of exp(-i H(t_k) dt) over midpoints t_k = (k + 1/2) dt.
Operator time_ordered_oracle(const TimeDependentOperator& h, const HilbertLayout& layout, double t_final, int steps);
Operator time_ordered_oracle(const HamiltonianProvider& h, const HilbertLayout& layout, double t_final, int steps);

/// The same midpoint product applied to a block of columns, sampled at
/// increasing multiples of dt.
std::vector<Matrix> time_ordered_columns(const TimeDependentOperator& h, const Matrix& x0,
                                         const std::vector<double>& times, double dt);

/// Largest singular value of U_magnus(t) - U_oracle(t) on the subspace of
/// fewer than layout.fock_dim() photons. Both are built on an enlarged
/// truncation: the closed form relies on [a, a^dag] = 1, which fails at the
/// truncation edge, so comparing the raw truncated matrices measures the
/// edge rather than the propagator.
std::vector<double> magnus_oracle_distance(const EffectiveParams& e, const HilbertLayout& layout,
                                           const std::vector<double>& times, int steps_per_period = 10000);

// ------------------------------------------------------------- integration

struct IntegratorSettings {
  /// Step bound as a fraction of the fastest period 2 pi / w_fast, where
  /// w_fast is the largest of: modulation frequencies, the norm bound of the
  /// generator, and `min_frequency`.
  double step_fraction = 1.0 / 40.0;
  double min_frequency = 0.0;
  /// Cumulative |norm - 1| allowed for pure states before the step is halved.
  double drift_tolerance = 1e-7;
  int max_refinements = 6;
};

struct IntegratorReport {
  double step = 0.0;       // largest step used (s)
  std::int64_t steps = 0;  // total RK4 steps of the accepted run
  double norm_drift = 0.0;
  int refinements = 0;
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  IntegratorReport integrator;
  std::uint64_t seed = 0;
  std::int64_t trajectories = 0;  // stochastic runs only
};

/// Largest step allowed for a generator under the settings. Time-independent
/// generators are stepped by a Taylor series summed to rounding, with
/// ||H|| h <= 2; step_fraction applies to time-dependent ones.
double max_step(const TimeDependentOperator& h, const IntegratorSettings& settings);

/// RK4 integration of i d(psi)/dt = H(t) psi; returns the state at every grid
/// point. Pure states are renormalized after each step and the grid is
/// re-run with half the step while the cumulative drift exceeds the budget.
std::vector<Vector> integrate_schrodinger(const TimeDependentOperator& h, const Vector& psi0,
                                          const std::vector<double>& grid, const IntegratorSettings& settings,
                                          IntegratorReport* report = nullptr);

Trajectory<StateVector> propagate_schrodinger(const TimeDependentOperator& h, const StateVector& psi0,
                                              const std::vector<double>& grid,
                                              const IntegratorSettings& settings = {});

/// Frame in which full-model results are returned.
enum class OutputFrame { lab, rotating };

/// Receives the full-basis state at grid point `index`.
using StateVisitor = std::function<void(std::size_t index, const Vector& psi)>;

/// exp(-i H (t - grid[0])) psi0 at every grid point for a constant sparse H,
/// by Taylor series on substeps with ||H|| dt <= 2 (accurate to rounding).
std::vector<Vector> propagate_constant(const SparseMatrix& h, const Vector& psi0, const std::vector<double>& grid);

/// Exact evolution under the effective Hamiltonian (symmetric sector when
/// the initial state allows it).
void evolve_effective(const EffectiveParams& e, const HilbertLayout& layout, const Vector& psi0,
                      const std::vector<double>& grid, const StateVisitor& visit);

/// Closed-system evolution of a lab-frame initial state under the full
/// model. Permutation-symmetric initial states are propagated in the
/// symmetric sector and embedded back.
Trajectory<StateVector> evolve_closed(const SystemParams& p, const HilbertLayout& layout, const StateVector& psi0,
                                      const std::vector<double>& grid, FullModel model,
                                      const IntegratorSettings& settings = {},
                                      OutputFrame frame = OutputFrame::rotating);
IntegratorReport evolve_closed(const SystemParams& p, const HilbertLayout& layout, const Vector& psi0,
                               const std::vector<double>& grid, FullModel model, const IntegratorSettings& settings,
                               OutputFrame frame, const StateVisitor& visit);

/// Jump operators sqrt(gamma) sigma_k^- (each qubit) and sqrt(kappa) a.
std::vector<SparseMatrix> jump_operators(const SystemParams& p, const HilbertLayout& layout);

/// Master equation with the lab-frame dissipators, starting from rho0 at
/// grid[0]. Checks trace (1e-6) and positivity (-1e-8) at grid points.
Trajectory<DensityMatrix> lindblad_evolve(const SystemParams& p, const HilbertLayout& layout,
                                          const DensityMatrix& rho0, const std::vector<double>& grid,
                                          FullModel model = FullModel::lab, const IntegratorSettings& settings = {},
                                          OutputFrame frame = OutputFrame::rotating);

/// Linear extension: evolves an arbitrary operator x (not necessarily a
/// density matrix) to t_final and returns it in the requested frame.
Matrix lindblad_map(const SystemParams& p, const HilbertLayout& layout, const Matrix& x, double t_final,
                    FullModel model = FullModel::lab, const IntegratorSettings& settings = {},
                    OutputFrame frame = OutputFrame::rotating);

// -------------------------------------------------------------------- MCWF

struct McwfSettings {
  std::int64_t trajectories = 1000;
  std::uint64_t seed = 1;
  IntegratorSettings integrator;
};

/// Value of an observable on a normalized trajectory state (full basis,
/// requested frame) at grid point `index`.
using TrajectoryObservable = std::function<double(std::size_t index, const Vector& psi)>;

struct McwfEstimate {
  std::vector<std::vector<double>> mean;       // [observable][grid point]
  std::vector<std::vector<double>> std_error;  // standard error of the mean
  std::int64_t trajectories = 0;
  std::int64_t jumped_trajectories = 0;
  std::int64_t jumps = 0;
  IntegratorReport integrator;
};

/// Trajectory-averaged observables. All trajectories share the deterministic
/// no-jump evolution until their own first jump; the result is identical to
/// running every trajectory separately with the same per-trajectory streams.
McwfEstimate mcwf_estimate(const SystemParams& p, const HilbertLayout& layout, const StateVector& psi0,
                           const std::vector<double>& grid, FullModel model, const McwfSettings& settings,
                           const std::vector<TrajectoryObservable>& observables,
                           OutputFrame frame = OutputFrame::rotating);

/// Trajectory-averaged density matrices (dense; small systems).
Trajectory<DensityMatrix> mcwf_evolve(const SystemParams& p, const HilbertLayout& layout, const StateVector& psi0,
                                      const std::vector<double>& grid, std::int64_t n_traj, std::uint64_t seed,
                                      FullModel model = FullModel::lab, const IntegratorSettings& settings = {},
                                      OutputFrame frame = OutputFrame::rotating);

/// Seed of trajectory k derived from the master seed (splitmix64).
std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t k);

// ------------------------------------------------------------------ frames

/// U^dag psi.
StateVector to_rotating_frame(const StateVector& psi, const Operator& u);
/// U^dag rho U, the same convention as for vectors.
DensityMatrix to_rotating_frame(const DensityMatrix& rho, const Operator& u);

}  // namespace cqrabi
