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
#include <string>
#include <utility>
#include <vector>

#include "cqrabi/dynamics.hpp"
#include "cqrabi/hilbert.hpp"
#include "cqrabi/model.hpp"

namespace cqrabi {

enum class Protocol { fidelity_scan, gate, cat, ghz };
enum class DynamicsMode { effective, full_unitary, full_dissipative };
enum class DissipativeEngine { dense, mcwf };

std::string to_string(Protocol p);
std::string to_string(DynamicsMode m);
std::string to_string(DissipativeEngine e);
std::string to_string(FullModel m);

struct ExperimentConfig {
  SystemParams params;
  Protocol protocol = Protocol::ghz;
  int fock_dim = 0;             // 0: default_fock_dim(params)
  double t_end = 0.0;           // 0: one effective period
  std::int64_t samples = 201;   // grid points on [0, t_end]
  std::vector<DynamicsMode> modes{DynamicsMode::effective, DynamicsMode::full_unitary};
  DissipativeEngine engine = DissipativeEngine::dense;
  std::int64_t trajectories = 2000;
  std::uint64_t seed = 1;
  FullModel full_model = FullModel::lab;
  /// Re-run at twice the truncation and require the figures of merit to
  /// move by less than kConvergenceTolerance.
  bool convergence_check = true;
  IntegratorSettings integrator;

  bool has(DynamicsMode m) const;
  int resolved_fock_dim() const;
  HilbertLayout layout() const;
  double horizon() const;

  /// Throws ConfigError for inconsistent settings.
  void validate() const;
};

inline constexpr double kConvergenceTolerance = 1e-4;

struct Series {
  std::string name;
  std::vector<double> values;
};

struct ExperimentResult {
  Protocol protocol = Protocol::ghz;
  std::vector<double> times;
  std::vector<Series> series;                               // F_ideal, F_full, F_diss subset
  std::vector<std::pair<std::string, double>> summary;      // ordered scalar results
  std::vector<std::pair<std::string, std::string>> meta;    // provenance of the run
  RegimeReport regime;

  bool has_series(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
  bool has_summary(const std::string& key) const;
  double value(const std::string& key) const;
  std::string meta_value(const std::string& key) const;

  void set(const std::string& key, double v);
  void note(const std::string& key, const std::string& v);
};

/// max(16, ceil(4 (N g~/|w~|)^2 + 10)).
int default_fock_dim(const SystemParams& p);

std::vector<double> linspace(double a, double b, std::int64_t n);

/// |gg...g> (x) |0>.
Vector ground_state(const HilbertLayout& layout);

/// GHZ comparison target (with the vacuum). Even N:
/// e^{i pi/4}/sqrt2 (|g..g> + e^{i(N-1)pi/2} |e..e>). Odd N: the same
/// state with the local rotation e^{-i pi/8} e^{i pi J_x/2} applied to
/// e^{i pi/4}/sqrt2 (|g..g> - e^{i N pi/2} |e..e>).
Vector ghz_target(const HilbertLayout& layout);
/// For odd N the unrotated GHZ form; identical to ghz_target for even N.
Vector ghz_raw_target(const HilbertLayout& layout);

/// (|N/2, N/2>_x + |N/2, -N/2>_x)/sqrt2 (x) |0>.
Vector cat_initial_state(const HilbertLayout& layout);

/// Ideal projective measurement of the spin register onto
/// |+-> = (|N/2, N/2>_x +- |N/2, -N/2>_x)/sqrt2.
struct CatMeasurement {
  double p_plus = 0.0;
  double p_minus = 0.0;
  Vector boson_plus;   // normalized post-measurement resonator states
  Vector boson_minus;
};
CatMeasurement measure_cat(const HilbertLayout& layout, const Vector& psi);

/// |<a>| of the resonator conditioned on the spin being |N/2, N/2>_x.
double conditional_displacement(const HilbertLayout& layout, const Vector& psi);

/// Parameter set of the fidelity study for one relative coupling
/// g~/w~ in {0.25, 0.5, 1, 2}: epsilon = omega_r = 2pi 10 GHz,
/// Omega_z = 0.004 omega_r, Omega_x = 2 omega_z = 0.2 omega_r,
/// g = 0.002 omega_r, omega_x = {0.996, 0.998, 0.999, 0.9995} omega_r.
SystemParams scan_params(int n_qubits, double ratio);

/// Multiplies omega_x, omega_z and Omega_x by `factor` and moves omega_r
/// and epsilon with omega_x, so every effective parameter is unchanged.
SystemParams scale_margins(const SystemParams& p, double factor);

ExperimentResult run_fidelity_scan(const ExperimentConfig& cfg);
ExperimentResult run_gate_protocol(const ExperimentConfig& cfg);
ExperimentResult run_cat_protocol(const ExperimentConfig& cfg);
ExperimentResult run_ghz_protocol(const ExperimentConfig& cfg);

/// Dispatches on cfg.protocol, aborts on a hard regime failure and runs the
/// truncation convergence check when enabled.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace cqrabi
