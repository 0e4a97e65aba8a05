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


#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cqrabi/cli.hpp"
#include "cqrabi/dynamics.hpp"
#include "cqrabi/metrics.hpp"
#include "cqrabi/protocols.hpp"

namespace py = pybind11;
using namespace cqrabi;

namespace {

py::dict to_dict(const ExperimentResult& r) {
  py::dict series;
  for (const auto& s : r.series) series[py::str(s.name)] = s.values;
  py::dict summary;
  for (const auto& [k, v] : r.summary) summary[py::str(k)] = v;
  py::dict meta;
  for (const auto& [k, v] : r.meta) meta[py::str(k)] = v;
  py::dict out;
  out["protocol"] = to_string(r.protocol);
  out["times"] = r.times;
  out["series"] = series;
  out["summary"] = summary;
  out["meta"] = meta;
  return out;
}

ExperimentResult run_text(const std::string& text, const std::string& protocol, std::optional<int> fock_dim,
                          std::optional<std::uint64_t> seed, std::optional<std::int64_t> trajectories) {
  ExperimentConfig cfg = parse_config(text).experiment;
  if (!protocol.empty()) cfg.protocol = parse_protocol(protocol);
  if (fock_dim) cfg.fock_dim = *fock_dim;
  if (seed) cfg.seed = *seed;
  if (trajectories) cfg.trajectories = *trajectories;
  cfg.validate();
  py::gil_scoped_release release;
  return run_experiment(cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Driven multi-qubit Rabi model: effective gates, GHZ and cat-state protocols";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalBudgetError>(m, "NumericalBudgetError", PyExc_RuntimeError);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init<>())
      .def_readwrite("n_qubits", &SystemParams::n_qubits)
      .def_readwrite("omega_r", &SystemParams::omega_r)
      .def_readwrite("epsilon", &SystemParams::epsilon)
      .def_readwrite("g", &SystemParams::g)
      .def_readwrite("Omega_x", &SystemParams::Omega_x)
      .def_readwrite("Omega_z", &SystemParams::Omega_z)
      .def_readwrite("omega_x", &SystemParams::omega_x)
      .def_readwrite("omega_z", &SystemParams::omega_z)
      .def_readwrite("gamma", &SystemParams::gamma)
      .def_readwrite("kappa", &SystemParams::kappa)
      .def_static("reference", &SystemParams::reference, py::arg("n_qubits"))
      .def("validate", &SystemParams::validate);

  py::class_<EffectiveParams>(m, "EffectiveParams")
      .def_readonly("omega_r", &EffectiveParams::omega_r)
      .def_readonly("epsilon", &EffectiveParams::epsilon)
      .def_readonly("g", &EffectiveParams::g)
      .def_readonly("ratio", &EffectiveParams::ratio)
      .def("period", &EffectiveParams::period);

  m.def("effective_params", &effective_params, py::arg("params"));
  m.def("scan_params", &scan_params, py::arg("n_qubits"), py::arg("ratio"));
  m.def("default_fock_dim", &default_fock_dim, py::arg("params"));
  m.def(
      "displacement_phase",
      [](const EffectiveParams& e, double t) {
        const DisplacementPhase d = displacement_phase(e, t);
        return py::make_tuple(d.beta, d.phi);
      },
      py::arg("effective"), py::arg("t"), "(beta(t), phi(t)) of the effective propagator");

  m.def("entangling_power", &entangling_power, py::arg("u"));
  m.def("xx_gate", &xx_gate, py::arg("phi"));
  m.def("cnot", &cnot);
  m.def(
      "process_fidelity", [](const std::vector<Matrix>& outputs, const Matrix& ideal) {
        return process_fidelity(outputs, ideal);
      },
      py::arg("outputs"), py::arg("ideal"), "outputs: channel images of the Pauli basis, in order");
  m.def(
      "cnot_residual", [](const Matrix& gate) { return analyze_gate(gate, {}).residual; }, py::arg("gate"));

  m.def(
      "run_config",
      [](const std::string& text, const std::string& protocol, std::optional<int> fock_dim,
         std::optional<std::uint64_t> seed, std::optional<std::int64_t> trajectories) {
        return to_dict(run_text(text, protocol, fock_dim, seed, trajectories));
      },
      py::arg("text"), py::arg("protocol") = "", py::arg("fock_dim") = py::none(), py::arg("seed") = py::none(),
      py::arg("trajectories") = py::none(),
      "Runs a configuration given as text (GHz, ns) and returns times, series, summary and meta.");

  m.def("validate", [] {
    py::list out;
    for (const auto& c : run_validation_suite()) out.append(py::make_tuple(c.name, c.error, c.tolerance, c.pass));
    return out;
  });
}
