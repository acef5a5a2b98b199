"""
Transferencia unidireccional de energía con dos qubits.

Series: p_e1, p_e2, photons, qubit_excitation, p_E2, p_E3, purity y, con
``run.reference_unitary``, p_e2_unitary (evolución sin cavidad).
"""

import logging
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from flujo.core.analysis import analytic_eigensystem, resonance_detuning
from flujo.core.dynamics import propagate_unitary
from flujo.core.errors import DegenerateAngleError, ParameterError
from flujo.core.hilbert import PROJ_UP, SpaceLayout, embed, partial_trace
from flujo.core.model import build_two_qubit, qubit_hamiltonian
from flujo.core.observables import (
    DerivedScalar,
    Recordable,
    dressed_population_observable,
    excitation_observable,
    excitation_total_observable,
    photon_number_observable,
    purity,
)
from flujo.experiments.common import (
    TransferResult,
    clamp_columns,
    convergence_fields,
    excitation_drift,
    initial_density,
    integrate,
    time_to_half,
)
from flujo.experiments.config import ExperimentConfig
from flujo.experiments.results import header_lines, param_columns, write_csv

logger = logging.getLogger(__name__)

PROBABILITY_COLUMNS = ("p_e1", "p_e2", "p_E2", "p_E3", "p_e2_unitary")


def _recordables(cfg: ExperimentConfig, layout: SpaceLayout) -> List[Recordable]:
    items: List[Recordable] = [
        excitation_observable(layout, 0),
        excitation_observable(layout, 1),
        photon_number_observable(layout),
        excitation_total_observable(layout),
    ]
    try:
        items += [dressed_population_observable(cfg.model, layout, 2),
                  dressed_population_observable(cfg.model, layout, 3)]
    except DegenerateAngleError:
        logger.warning("θ indefinido (Δ = 0, g = 0): se omiten p_E2 y p_E3")
    items.append(DerivedScalar("purity", purity))
    return items


def compute_energy_transfer(cfg: ExperimentConfig) -> TransferResult:
    """Integra sin escribir archivos (lo usan también los barridos)."""
    if cfg.model.n_qubits != 2:
        raise ParameterError("La transferencia de energía usa el modelo de dos qubits")
    system = build_two_qubit(cfg.model)
    rho0 = initial_density(cfg)
    traj, ss = integrate(cfg, system, rho0, _recordables(cfg, system.layout))
    frame = traj.frame()

    summary = {"name": cfg.name, "experiment": "energy-transfer"}
    if cfg.run.reference_unitary:
        h_q, q_layout = qubit_hamiltonian(cfg.model)
        rho_q0 = partial_trace(system.layout, rho0, system.layout.qubit_sites)
        proj = embed(q_layout, 1, PROJ_UP)
        states = propagate_unitary(h_q, rho_q0, traj.times)
        frame["p_e2_unitary"] = [float(np.real(np.trace(r @ proj))) for r in states]
        summary["unitary_deviation"] = float(np.max(np.abs(frame["p_e2"] - frame["p_e2_unitary"])))

    summary.update({
        "steady_value": float(frame["p_e2"].iloc[-1]),
        "p_e1_final": float(frame["p_e1"].iloc[-1]),
        "photons_final": float(frame["photons"].iloc[-1]),
        "t_half": time_to_half(traj.times, traj.records["p_e2"]),
    })
    summary.update(convergence_fields(cfg, system, traj, ss))
    summary["excitation_drift"] = excitation_drift(traj)
    summary["max_trace_error"] = traj.max_trace_error
    try:
        summary["predicted_transfer"] = analytic_eigensystem(cfg.model).predicted_transfer
    except DegenerateAngleError:
        summary["predicted_transfer"] = float("nan")
    summary["resonance_detuning"] = resonance_detuning(cfg.model)
    summary.update(param_columns(cfg.model))
    summary["config_hash"] = cfg.config_hash()
    return TransferResult(frame=clamp_columns(frame, PROBABILITY_COLUMNS), summary=summary, steady=ss)


def run_energy_transfer(cfg: ExperimentConfig, out_dir: Optional[Path] = None) -> TransferResult:
    """Ejecuta y escribe ``<name>.csv`` (serie) y ``<name>_summary.csv``."""
    result = compute_energy_transfer(cfg)
    target = cfg.output_dir(out_dir)
    header = header_lines("energy-transfer", cfg.config_hash(), cfg.resolved())
    result.files.append(write_csv(target / f"{cfg.name}.csv", result.frame, header))
    result.files.append(write_csv(target / f"{cfg.name}_summary.csv", pd.DataFrame([result.summary]), header))
    return result
