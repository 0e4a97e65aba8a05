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

#include <functional>
#include <string>
#include <vector>

#include "cqrabi/hilbert.hpp"
#include "cqrabi/operators.hpp"
#include "cqrabi/td_operator.hpp"

namespace cqrabi {

/// Physical parameters. All rates are angular frequencies in rad/s.
struct SystemParams {
  int n_qubits = 1;
  double omega_r = 0.0;  // resonator
  double epsilon = 0.0;  // qubit splitting (uniform)
  double g = 0.0;        // qubit-resonator coupling
  double Omega_x = 0.0;  // transverse drive amplitude
  double Omega_z = 0.0;  // longitudinal drive amplitude
  double omega_x = 0.0;  // transverse drive frequency
  double omega_z = 0.0;  // longitudinal drive frequency
  double gamma = 0.0;    // qubit decay
  double kappa = 0.0;    // resonator loss

  /// Throws ConfigError on negative rates, non-positive frequencies or N < 1.
  void validate() const;

  /// Reference parameter set: omega_r = epsilon = 2pi 10 GHz, g = 2pi 20 MHz,
  /// Omega_x = 2 omega_z = 2pi 2 GHz, omega_x = 2pi 9.98 GHz, Omega_z = 0,
  /// gamma = 2pi 0.05 MHz, kappa = 2pi 0.012 MHz.
  static SystemParams reference(int n_qubits);
};

/// Parameters of the effective collective model
/// H_eff = w n + e J_z + g (a + a^dag) J_x.
struct EffectiveParams {
  double omega_r = 0.0;  // omega_r - omega_x
  double epsilon = 0.0;  // Omega_z / 2
  double g = 0.0;        // g / 2
  double ratio = 0.0;    // g / omega_r (of this struct)

  /// One period 2 pi / |omega_r|.
  double period() const;
};

/// Throws std::invalid_argument when omega_x == omega_r.
EffectiveParams effective_params(const SystemParams& p);

/// Which generator stands in for the lab-frame dynamics.
///
/// `lab` keeps every term of the driven Hamiltonian. `first_rwa` drops the
/// terms oscillating at 2 omega_x in the drive-carrier frame and keeps the
/// rest exactly.
enum class FullModel { lab, first_rwa };

struct RegimeCondition {
  std::string name;
  double margin = 0.0;  // ratio for the ">>" conditions, relative error for the equality
  bool pass = false;
  bool hard_fail = false;
};

struct RegimeReport {
  std::vector<RegimeCondition> conditions;
  bool pass = false;
  bool hard_fail = false;

  std::string describe() const;
};

/// Margin threshold for the ">>" conditions and the rounding allowance.
inline constexpr double kRegimeMargin = 5.0;
inline constexpr double kRegimeMarginAllowance = 4.95;

RegimeReport check_regime(const SystemParams& p);

// ------------------------------------------------------------ Hamiltonians

/// Lab-frame Hamiltonian at time t (dense).
Operator full_hamiltonian(const SystemParams& p, const HilbertLayout& layout, double t);

/// Lab-frame Hamiltonian as sparse terms.
TimeDependentOperator lab_hamiltonian(const SystemParams& p, const OperatorSet& ops);

/// Generator in the frame exp(-i omega_x (J_z + n) t). For FullModel::lab
/// this is an exact rewrite of the lab Hamiltonian; the dissipators sigma_k^-
/// and a only pick up phases there, so the master equation keeps its form.
TimeDependentOperator carrier_frame_hamiltonian(const SystemParams& p, const OperatorSet& ops, FullModel model);

/// Effective Hamiltonian (dense and sparse).
Operator effective_hamiltonian(const EffectiveParams& e, const HilbertLayout& layout);
SparseMatrix effective_hamiltonian(const EffectiveParams& e, const OperatorSet& ops);

/// Effective Hamiltonian in the interaction picture of w n + e J_z.
Operator interaction_picture_hamiltonian(const EffectiveParams& e, const HilbertLayout& layout, double t);
TimeDependentOperator interaction_picture_terms(const EffectiveParams& e, const OperatorSet& ops);

/// Parity exp(i pi (n + J_z + N/2)).
Operator parity_operator(const HilbertLayout& layout);

// ------------------------------------------------------------------ frames

/// U(t) = exp(-i G_1 t) exp(-i G_2 t) ... with constant Hermitian G_k.
class FrameUnitary {
 public:
  FrameUnitary(HilbertLayout layout, std::vector<Matrix> generators);
  static FrameUnitary identity(const HilbertLayout& layout);

  const HilbertLayout& layout() const { return layout_; }
  Operator at(double t) const;
  /// i U^dag dU/dt = sum_k R_k^dag G_k R_k with R_k = prod_{j>k} exp(-i G_j t).
  Operator generator_term(double t) const;

 private:
  HilbertLayout layout_;
  std::vector<Matrix> generators_;
};

enum class FrameOrder {
  carrier_first,  // exp(-i omega_x (J_z + n) t) exp(-i Omega_x/2 J_x t)
  drive_first,    // exp(-i Omega_x/2 J_x t) exp(-i omega_x (J_z + n) t)
};

/// The rotating frame that maps the lab Hamiltonian onto the effective model.
FrameUnitary rotating_frame(const SystemParams& p, const HilbertLayout& layout,
                            FrameOrder order = FrameOrder::carrier_first);

Operator rotating_frame_unitary(const SystemParams& p, const HilbertLayout& layout, double t,
                                FrameOrder order = FrameOrder::carrier_first);

using HamiltonianProvider = std::function<Operator(double)>;

/// U^dag H U - i U^dag dU/dt at time t.
Operator transform_frame(const HamiltonianProvider& h, const FrameUnitary& u, double t);

/// Fast application of the rotating-frame unitary (carrier_first order) to
/// full-basis vectors and matrices, using the diagonal carrier factor and a
/// 2^N-dimensional spin rotation.
class RotatingFrame {
 public:
  RotatingFrame(const SystemParams& p, const HilbertLayout& layout);

  /// exp(-i Omega_x/2 J_x t) only; maps carrier-frame states to the rotating frame.
  Vector drive_adjoint(double t, const Vector& psi) const;
  Matrix drive_conjugate(double t, const Matrix& rho) const;  // V^dag rho V

  /// U(t)^dag psi for a lab-frame state.
  Vector adjoint_apply(double t, const Vector& psi) const;
  /// U(t) psi.
  Vector apply(double t, const Vector& psi) const;

  /// exp(-i omega_x (J_z + n) t) psi and its conjugation of rho; maps
  /// carrier-frame results back to the lab frame.
  Vector carrier_apply(double t, const Vector& psi) const;
  Matrix carrier_conjugate(double t, const Matrix& rho) const;

 private:
  Matrix spin_rotation(double t) const;  // exp(-i Omega_x/2 J_x t) on 2^N
  HilbertLayout layout_;
  double omega_x_;
  double half_drive_;
  Eigen::SelfAdjointEigenSolver<Matrix> jx_spin_;
  RealVector carrier_charges_;  // m + n per basis index
};

}  // namespace cqrabi
