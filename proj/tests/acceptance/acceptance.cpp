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


// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Pass criterion numbers as
// arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cqrabi/cli.hpp"
#include "cqrabi/dynamics.hpp"
#include "cqrabi/metrics.hpp"
#include "cqrabi/protocols.hpp"

using namespace cqrabi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void info(const std::string& line) { std::printf("    %s\n", line.c_str()); std::fflush(stdout); }

ExperimentConfig base(Protocol protocol, const SystemParams& p, std::vector<DynamicsMode> modes) {
  ExperimentConfig c;
  c.params = p;
  c.protocol = protocol;
  c.modes = std::move(modes);
  return c;
}

const std::vector<DynamicsMode> kAll{DynamicsMode::effective, DynamicsMode::full_unitary,
                                     DynamicsMode::full_dissipative};
const std::vector<DynamicsMode> kClosed{DynamicsMode::effective, DynamicsMode::full_unitary};

// ------------------------------------------------------------------------ 1

Outcome ghz_table() {
  const double want_full[] = {0.9971, 0.9924, 0.9886, 0.9816, 0.9761};
  const double want_diss[] = {0.9806, 0.9644, 0.9497, 0.9321, 0.9162};
  Outcome o;
  for (int n = 2; n <= 6; ++n) {
    ExperimentConfig c = base(Protocol::ghz, SystemParams::reference(n), kAll);
    c.full_model = FullModel::first_rwa;
    c.samples = 2;
    const bool mcwf = n >= 4;
    c.engine = mcwf ? DissipativeEngine::mcwf : DissipativeEngine::dense;
    c.trajectories = 10000;
    c.seed = 2026;
    const ExperimentResult r = run_experiment(c);
    const double ff = r.value("F_full_T"), fd = r.value("F_diss_T");
    const double wf = want_full[n - 2], wd = want_diss[n - 2];
    const double tol_d = mcwf ? 0.02 : 0.01;
    std::string line = "N=" + std::to_string(n) + "  F_ideal " + fmt("%.10f", r.value("F_ideal_T")) + "  F_full " +
                       fmt("%.4f", ff) + " (want " + fmt("%.4f", wf) + ")  F_diss " + fmt("%.4f", fd);
    if (mcwf) {
      line += " +- " + fmt("%.4f", r.value("F_diss_T_stderr")) + " (" + r.meta_value("jumped_trajectories") + "/" +
              std::to_string(c.trajectories) + " jumped)";
    }
    line += " (want " + fmt("%.4f", wd) + ")";
    if (r.has_summary("F_full_T_raw")) {
      line += "  unrotated target: F_full " + fmt("%.4f", r.value("F_full_T_raw")) + " F_diss " +
              fmt("%.4f", r.value("F_diss_T_raw"));
    }
    info(line);
    const std::string tag = "N=" + std::to_string(n);
    o.require(std::abs(r.value("F_ideal_T") - 1.0) < 1e-9, tag + " F_ideal");
    o.require(std::abs(ff - wf) <= 0.005, tag + " F_full off by " + fmt("%.4f", ff - wf));
    o.require(std::abs(fd - wd) <= tol_d, tag + " F_diss off by " + fmt("%.4f", fd - wd));
  }
  return o;
}

// ------------------------------------------------------------------------ 2

Outcome gate_fidelities() {
  ExperimentConfig c = base(Protocol::gate, SystemParams::reference(2), kAll);
  c.full_model = FullModel::first_rwa;
  const ExperimentResult r = run_experiment(c);
  const double ff = r.value("F_pro_full"), fd = r.value("F_pro_diss");
  info("F_pro effective " + fmt("%.10f", r.value("F_pro_effective")) + "  full " + fmt("%.4f", ff) +
       " (want 0.9957 +- 0.003)  dissipative " + fmt("%.4f", fd) + " (want 0.9632 +- 0.005)");
  Outcome o;
  o.require(std::abs(ff - 0.9957) <= 0.003, "full_unitary off by " + fmt("%.4f", ff - 0.9957));
  o.require(std::abs(fd - 0.9632) <= 0.005, "full_dissipative off by " + fmt("%.4f", fd - 0.9632) +
                                                 " (the stated decay rates cannot produce this loss)");
  return o;
}

// ------------------------------------------------------------------------ 3

Outcome entangling_power_form() {
  Outcome o;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double phi = kPi * (k + 0.5) / 20.0 - 0.3;
    const double s = std::sin(phi);
    worst = std::max(worst, std::abs(entangling_power(xx_gate(phi)) - 2.0 / 9.0 * s * s));
  }
  const EffectiveParams e = effective_params(SystemParams::reference(2));
  const double cnot_err = std::abs(entangling_power(cnot()) - 2.0 / 9.0);
  info("max |e_p - (2/9) sin^2 phi| over 20 angles " + fmt("%.3g", worst) + "  |e_p(CNOT) - 2/9| " +
       fmt("%.3g", cnot_err) + "  phi(T) " + fmt("%.12f", displacement_phase(e, e.period()).phi));
  o.require(worst < 1e-10, "closed form deviation " + fmt("%.3g", worst));
  o.require(cnot_err < 1e-12, "CNOT deviation " + fmt("%.3g", cnot_err));
  return o;
}

// ------------------------------------------------------------------------ 4

Outcome cnot_equivalence() {
  ExperimentConfig c = base(Protocol::gate, SystemParams::reference(2), {DynamicsMode::effective});
  const ExperimentResult r = run_experiment(c);
  const double res = r.value("cnot_residual");
  const double direct = analyze_gate(xx_gate(kPi / 2.0), {}).residual;
  info("phi " + fmt("%.12f", r.value("phi")) + "  residual of the evolved gate " + fmt("%.3g", res) +
       "  of the ideal XX(pi/2) " + fmt("%.3g", direct));
  Outcome o;
  o.require(res < 1e-8, "residual " + fmt("%.3g", res));
  o.require(r.value("cnot_equivalent") == 1.0, "not flagged CNOT-equivalent");
  return o;
}

// ------------------------------------------------------------------------ 5

Outcome magnus_vs_oracle() {
  Outcome o;
  for (int n = 1; n <= 3; ++n) {
    const EffectiveParams e = effective_params(SystemParams::reference(n));
    const double T = e.period();
    const std::vector<double> d = magnus_oracle_distance(e, HilbertLayout(n, 20), {0.25 * T, 0.5 * T, T});
    info("N=" + std::to_string(n) + " F=20  ||U_magnus - U_oracle||_2 at T/4, T/2, T: " + fmt("%.3g", d[0]) + ", " +
         fmt("%.3g", d[1]) + ", " + fmt("%.3g", d[2]));
    for (double x : d) o.require(x < 1e-6, "N=" + std::to_string(n) + " distance " + fmt("%.3g", x));
  }
  return o;
}

// ------------------------------------------------------------------------ 6

Outcome cat_anchors() {
  Outcome o;
  for (int n = 1; n <= 4; ++n) {
    const std::string tag = "N=" + std::to_string(n);
    ExperimentConfig c = base(Protocol::cat, SystemParams::reference(n), kClosed);
    const ExperimentResult r = run_experiment(c);
    ExperimentConfig fine = c;
    fine.integrator.step_fraction = 0.5 * c.integrator.step_fraction;
    fine.convergence_check = false;
    const ExperimentResult rf = run_experiment(fine);
    const double dp = std::max(std::abs(r.value("P_plus") - r.value("P_plus_expected")),
                               std::abs(r.value("P_minus") - r.value("P_minus_expected")));
    const double dd = std::abs(r.value("peak_displacement") - r.value("peak_displacement_expected"));
    const double di = std::abs(r.value("F_ideal_t0") - 1.0);
    const double dh = std::abs(r.value("F_full_t0") - rf.value("F_full_t0"));
    info(tag + "  P+ " + fmt("%.12f", r.value("P_plus")) + "  |dP| " + fmt("%.2g", dp) + "  peak |<a>| " +
         fmt("%.9f", r.value("peak_displacement")) + " (want " + fmt("%.9f", r.value("peak_displacement_expected")) +
         ")  F_full(t0) " + fmt("%.6f", r.value("F_full_t0")) + " vs " + fmt("%.6f", rf.value("F_full_t0")) +
         " at half step");
    o.require(dp < 1e-9, tag + " branch probabilities off by " + fmt("%.3g", dp));
    o.require(dd < 1e-6, tag + " peak displacement off by " + fmt("%.3g", dd));
    o.require(di < 1e-9, tag + " F_ideal(t0) off by " + fmt("%.3g", di));
    o.require(dh < 1e-3, tag + " step-size sensitivity " + fmt("%.3g", dh));
  }
  return o;
}

// ------------------------------------------------------------------------ 7

double min_full(const SystemParams& p) {
  ExperimentConfig c = base(Protocol::fidelity_scan, p, kClosed);
  return run_experiment(c).value("min_F_full");
}

Outcome fidelity_panels() {
  Outcome o;
  const std::filesystem::path root = std::filesystem::temp_directory_path() / "cqrabi_acceptance_panels";
  std::filesystem::remove_all(root);
  for (double ratio : {0.25, 0.5, 1.0, 2.0}) {
    std::string line = "ratio " + fmt("%g", ratio) + "  min F_full:";
    for (int n = 2; n <= 6; ++n) {
      const std::string tag = "ratio " + fmt("%g", ratio) + " N=" + std::to_string(n);
      ExperimentConfig c = base(Protocol::fidelity_scan, scan_params(n, ratio), kClosed);
      ExperimentResult r = run_experiment(c);
      quantize(r);
      const std::string dir = (root / ("r" + fmt("%g", ratio) + "_n" + std::to_string(n))).string();
      write_outputs(dir, c, r);
      const SeriesTable t = read_series_csv(dir + "/series.csv");
      o.require(!t.columns.empty() && t.times.size() == static_cast<std::size_t>(c.samples), tag + " csv shape");
      for (const auto& col : t.values) o.require(!col.empty() && col.front() == 1.0, tag + " F(0) != 1");
      line += " " + fmt("%.4f", r.value("min_F_full"));
    }
    info(line);
  }
  const SystemParams p = scan_params(2, 0.25);
  const double before = min_full(p), after = min_full(scale_margins(p, 5.0));
  info("N=2 ratio 0.25: min F_full " + fmt("%.6f", before) + " -> " + fmt("%.6f", after) + " with margins x5");
  o.require(after > before, "margin scaling did not increase the minimum fidelity");
  std::filesystem::remove_all(root);
  return o;
}

// ------------------------------------------------------------------------ 8

Outcome open_system() {
  Outcome o;
  {
    SystemParams p;
    p.n_qubits = 1;
    p.omega_r = kTwoPi * 10.02e9;
    p.epsilon = p.omega_x = kTwoPi * 10e9;
    p.omega_z = kTwoPi * 1e9;
    p.gamma = kTwoPi * 1e6;
    const HilbertLayout layout(1, 2);
    Vector e0 = Vector::Zero(layout.dim());
    e0(layout.index(0, 0)) = 1.0;
    std::vector<double> grid;
    for (int k = 0; k <= 60; ++k) grid.push_back(0.05 * k / p.gamma);
    const auto traj = lindblad_evolve(p, layout, DensityMatrix::pure(StateVector(layout, e0)), grid, FullModel::lab);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double pe = traj.states[i].matrix()(layout.index(0, 0), layout.index(0, 0)).real();
      worst = std::max(worst, std::abs(pe - std::exp(-p.gamma * grid[i])));
    }
    info("free decay over 3/gamma: max |P_e - exp(-gamma t)| " + fmt("%.3g", worst));
    o.require(worst < 1e-6, "decay deviation " + fmt("%.3g", worst));
  }
  {
    SystemParams p = SystemParams::reference(2);
    p.gamma = kTwoPi * 5e6;
    p.kappa = kTwoPi * 2e6;
    const HilbertLayout layout(2, 8);
    Vector g0 = Vector::Zero(layout.dim());
    g0(layout.index(3, 0)) = 1.0;
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(5e-9 * k);
    const auto traj =
        lindblad_evolve(p, layout, DensityMatrix::pure(StateVector(layout, g0)), grid, FullModel::first_rwa);
    double drift = 0.0;
    for (const auto& rho : traj.states) drift = std::max(drift, std::abs(rho.trace() - 1.0));
    info("driven, lossy N=2 over 50 ns: max |Tr rho - 1| " + fmt("%.3g", drift));
    o.require(drift < 1e-6, "trace drift " + fmt("%.3g", drift));
  }
  {
    ExperimentConfig c = base(Protocol::ghz, SystemParams::reference(2), {DynamicsMode::full_dissipative});
    c.full_model = FullModel::first_rwa;
    c.samples = 2;
    c.convergence_check = false;
    const double dense = run_experiment(c).value("F_diss_T");
    c.engine = DissipativeEngine::mcwf;
    c.trajectories = 2000;
    c.seed = 11;
    const ExperimentResult m = run_experiment(c);
    const double se = m.value("F_diss_T_stderr");
    const double diff = std::abs(m.value("F_diss_T") - dense);
    info("N=2 GHZ F_diss(T): dense " + fmt("%.6f", dense) + "  MCWF " + fmt("%.6f", m.value("F_diss_T")) + " +- " +
         fmt("%.6f", se));
    o.require(diff <= 2.0 * se, "MCWF differs by " + fmt("%.3g", diff / se) + " standard errors");
  }
  return o;
}

// ------------------------------------------------------------------------ 9

Outcome invariant_suite() {
  Outcome o;
  for (const auto& c : run_validation_suite()) {
    if (!c.pass) o.require(false, c.name + " (error " + fmt("%.3g", c.error) + ")");
  }
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "GHZ fidelities at t = T, N = 2..6", ghz_table},
      {2, "two-qubit gate process fidelities", gate_fidelities},
      {3, "entangling power closed form", entangling_power_form},
      {4, "CNOT local equivalence", cnot_equivalence},
      {5, "Magnus propagator vs time-ordered product", magnus_vs_oracle},
      {6, "cat-state anchors", cat_anchors},
      {7, "fidelity-scan panels and margin scaling", fidelity_panels},
      {8, "open-system sanity", open_system},
      {9, "invariant suite", invariant_suite},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    std::printf("criterion %d: %s\n", c.id, c.title);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%.0f s)%s%s\n", o.pass ? "PASS" : "FAIL", c.id, secs, o.detail.empty() ? "" : ": ",
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
