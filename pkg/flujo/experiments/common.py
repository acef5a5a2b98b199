"""
Piezas compartidas por los experimentos de transferencia.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from flujo.core import linalg
from flujo.core.analysis import default_horizon
from flujo.core.dynamics import SteadyState, Trajectory, evolve, lindblad_rhs, steady_state
from flujo.core.hilbert import DOWN, UP, basis_state, ket_to_dm
from flujo.core.linalg import ComplexMatrix
from flujo.core.model import OpenSystem
from flujo.core.observables import Recordable, clamp_probability
from flujo.experiments.config import ExperimentConfig

logger = logging.getLogger(__name__)

HALF = 0.5


@dataclass
class TransferResult:
    """Serie temporal, resumen de una fila y estado estacionario (si se buscó)."""

    frame: pd.DataFrame
    summary: Dict[str, Any]
    steady: Optional[SteadyState] = None
    files: List[Path] = field(default_factory=list)


def initial_density(cfg: ExperimentConfig) -> ComplexMatrix:
    """
    ρ0 a partir de ``initial_state``.

    - ``labels``: estado de base |labels⟩ ⊗ |cavity_level⟩.
    - (α, β) con dos qubits: α|↑↓⟩ + β|↓↑⟩.
    - (α, β) con cuatro qubits (o sin etiquetas): (α|↑↓⟩₁₃ + β|↓↑⟩₁₃)|↓↓⟩₂₄.
    - Sin nada, dos qubits: |↑↓⟩.
    """
    params = cfg.model
    layout = params.layout()
    spec = cfg.initial_state
    cav = spec.cavity_level
    if spec.labels is not None:
        return ket_to_dm(basis_state(layout, [*spec.labels, cav]))
    if params.n_qubits == 2 and spec.alpha is None:
        return ket_to_dm(basis_state(layout, (UP, DOWN, cav)))
    alpha, beta = spec.amplitudes
    if params.n_qubits == 2:
        first, second = (UP, DOWN, cav), (DOWN, UP, cav)
    else:
        first, second = (UP, DOWN, DOWN, DOWN, cav), (DOWN, DOWN, UP, DOWN, cav)
    ket = alpha * basis_state(layout, first) + beta * basis_state(layout, second)
    return ket_to_dm(ket)


def integrate(
    cfg: ExperimentConfig,
    system: OpenSystem,
    rho0: ComplexMatrix,
    observables: Sequence[Recordable],
) -> Tuple[Trajectory, Optional[SteadyState]]:
    """``steady_state`` con el horizonte estimado o ``evolve`` hasta ``run.t_final``."""
    integ = cfg.integrator
    if cfg.run.steady_state:
        horizon = integ.horizon or default_horizon(cfg.model, integ.max_horizon)
        logger.debug("Horizonte de estado estacionario: %.6g", horizon)
        ss = steady_state(system.hamiltonian, system.collapse, rho0, integ, observables, horizon=horizon)
        return ss.trajectory, ss
    traj = evolve(system.hamiltonian, system.collapse, rho0, cfg.run.t_final, integ, observables)
    return traj, None


def time_to_half(times: NDArray[np.float64], values: NDArray[np.float64], level: float = HALF) -> float:
    """Primer t con values ≥ level, interpolado linealmente; NaN si no se alcanza."""
    above = np.flatnonzero(values >= level)
    if above.size == 0:
        return math.nan
    k = int(above[0])
    if k == 0:
        return float(times[0])
    t0, t1 = times[k - 1], times[k]
    v0, v1 = values[k - 1], values[k]
    return float(t0 + (level - v0) * (t1 - t0) / (v1 - v0))


def clamp_columns(frame: pd.DataFrame, columns: Sequence[str]) -> pd.DataFrame:
    out = frame.copy()
    for col in columns:
        if col in out:
            out[col] = [clamp_probability(col, v) for v in out[col].to_numpy()]
    return out


def convergence_fields(
    cfg: ExperimentConfig, system: OpenSystem, traj: Trajectory, ss: Optional[SteadyState]
) -> Dict[str, Any]:
    """t_reached, residual y converged; sin búsqueda de estado estacionario se evalúa el residuo final."""
    if ss is not None:
        return {"t_reached": ss.t_reached, "residual": ss.residual, "converged": ss.converged}
    residual = linalg.norm_max(lindblad_rhs(system.hamiltonian, system.collapse, traj.final_state))
    return {
        "t_reached": float(traj.times[-1]),
        "residual": residual,
        "converged": residual < cfg.integrator.ss_tol,
    }


def excitation_drift(traj: Trajectory) -> float:
    values = traj.records.get("qubit_excitation")
    if values is None or values.size == 0:
        return 0.0
    return float(np.max(np.abs(values - values[0])))
