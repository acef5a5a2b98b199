"""
Transferencia de estados cuánticos con cuatro qubits.

Se prepara (α|↑↓⟩₁₃ + β|↓↑⟩₁₃)|↓↓⟩₂₄|0⟩ y se sigue la fidelidad con
|↓↓⟩₁₃(α|↑↓⟩₂₄ + β|↓↑⟩₂₄), sin corrección de fase (``infidelity``) y
optimizada sobre la fase relativa (``fidelity_phase_opt``).
"""

import logging
from functools import partial
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from flujo.core.errors import ParameterError
from flujo.core.hilbert import SpaceLayout
from flujo.core.model import build_four_qubit
from flujo.core.observables import (
    DerivedScalar,
    Recordable,
    excitation_total_observable,
    logical_populations,
    phase_optimized_fidelity,
    photon_number_observable,
    purity,
    transfer_fidelity,
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

# pares lógicos (qubits 1,3) y (2,4) en índices de sitio
PAIR_13 = (0, 2)
PAIR_24 = (1, 3)

PROBABILITY_COLUMNS = ("fidelity", "fidelity_phase_opt", "p00_13", "p11_13", "p00_24", "p11_24")


def _logical(rho: np.ndarray, layout: SpaceLayout, pair: Tuple[int, int], index: int) -> float:
    value = logical_populations(rho, layout, pair)[index]
    return float(abs(value)) if index == 2 else float(value)


def _recordables(layout: SpaceLayout, alpha: complex, beta: complex) -> List[Recordable]:
    items: List[Recordable] = [
        DerivedScalar("fidelity", partial(transfer_fidelity, layout=layout, alpha=alpha, beta=beta)),
        DerivedScalar("fidelity_phase_opt", lambda rho: phase_optimized_fidelity(rho, layout, alpha, beta)[0]),
    ]
    for tag, pair in (("13", PAIR_13), ("24", PAIR_24)):
        items += [
            DerivedScalar(f"p00_{tag}", partial(_logical, layout=layout, pair=pair, index=0)),
            DerivedScalar(f"p11_{tag}", partial(_logical, layout=layout, pair=pair, index=1)),
            DerivedScalar(f"coh_{tag}", partial(_logical, layout=layout, pair=pair, index=2)),
        ]
    items += [
        photon_number_observable(layout),
        excitation_total_observable(layout),
        DerivedScalar("purity", purity),
    ]
    return items


def compute_state_transfer(cfg: ExperimentConfig) -> TransferResult:
    """Integra sin escribir archivos."""
    if cfg.model.n_qubits != 4:
        raise ParameterError("La transferencia de estados usa el modelo de cuatro qubits")
    system = build_four_qubit(cfg.model)
    alpha, beta = cfg.initial_state.amplitudes
    rho0 = initial_density(cfg)
    traj, ss = integrate(cfg, system, rho0, _recordables(system.layout, alpha, beta))

    frame = traj.frame()
    frame.insert(1, "infidelity", 1.0 - frame["fidelity"])
    final = frame.iloc[-1]
    _, phi_opt = phase_optimized_fidelity(traj.final_state, system.layout, alpha, beta)

    summary = {
        "name": cfg.name,
        "experiment": "state-transfer",
        "alpha_re": alpha.real, "alpha_im": alpha.imag,
        "beta_re": beta.real, "beta_im": beta.imag,
        "steady_value": float(final["infidelity"]),
        "fidelity": float(final["fidelity"]),
        "fidelity_phase_opt": float(final["fidelity_phase_opt"]),
        "phi_opt": phi_opt,
        "coherence_sum_initial": float(frame["coh_13"].iloc[0] + frame["coh_24"].iloc[0]),
        "coherence_sum_final": float(final["coh_13"] + final["coh_24"]),
        "t_half": time_to_half(traj.times, traj.records["fidelity"]),
    }
    summary.update(convergence_fields(cfg, system, traj, ss))
    summary["excitation_drift"] = excitation_drift(traj)
    summary["max_trace_error"] = traj.max_trace_error
    summary.update(param_columns(cfg.model))
    summary["config_hash"] = cfg.config_hash()
    logger.debug("state-transfer: 1-F=%.3e en t=%.6g", summary["steady_value"], summary["t_reached"])
    return TransferResult(frame=clamp_columns(frame, PROBABILITY_COLUMNS), summary=summary, steady=ss)


def run_state_transfer(cfg: ExperimentConfig, out_dir: Optional[Path] = None) -> TransferResult:
    """Ejecuta y escribe ``<name>.csv`` (serie) y ``<name>_summary.csv``."""
    result = compute_state_transfer(cfg)
    target = cfg.output_dir(out_dir)
    header = header_lines("state-transfer", cfg.config_hash(), cfg.resolved())
    result.files.append(write_csv(target / f"{cfg.name}.csv", result.frame, header))
    result.files.append(write_csv(target / f"{cfg.name}_summary.csv", pd.DataFrame([result.summary]), header))
    return result
