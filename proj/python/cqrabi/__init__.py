# Copyright 2026 The cqrabi Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Driven multi-qubit Rabi model simulator."""

from pathlib import Path

from ._core import (
    ConfigError,
    EffectiveParams,
    NumericalBudgetError,
    SystemParams,
    cnot,
    cnot_residual,
    default_fock_dim,
    displacement_phase,
    effective_params,
    entangling_power,
    process_fidelity,
    run_config,
    scan_params,
    validate,
    xx_gate,
)

__all__ = [
    "ConfigError",
    "EffectiveParams",
    "NumericalBudgetError",
    "SystemParams",
    "cnot",
    "cnot_residual",
    "default_fock_dim",
    "displacement_phase",
    "effective_params",
    "entangling_power",
    "process_fidelity",
    "run_config",
    "run_file",
    "scan_params",
    "validate",
    "xx_gate",
]


def run_file(path, protocol="", **overrides):
    """Like run_config, reading the configuration from `path`."""
    return run_config(Path(path).read_text(), protocol, **overrides)
