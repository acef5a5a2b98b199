"""
Barridos de un parámetro del modelo.

Cada valor del eje produce una fila independiente (transferencia de energía
con dos qubits, de estados con cuatro). Con más de un worker las filas se
reparten con ``multiprocessing.Pool.map``, que conserva el orden de entrada.
Un fallo en una fila queda registrado en su columna ``error`` y el barrido
continúa.
"""

import logging
import math
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from flujo.core.errors import ConfigError, FlujoError
from flujo.experiments.common import TransferResult
from flujo.experiments.config import ExperimentConfig
from flujo.experiments.energy import compute_energy_transfer
from flujo.experiments.results import axis_columns, header_lines, param_columns, write_csv
from flujo.experiments.state import compute_state_transfer

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["sweep_value", "steady_value", "t_half", "t_reached", "residual", "converged"]


def default_observable(cfg: ExperimentConfig) -> str:
    return "p_e2" if cfg.model.n_qubits == 2 else "infidelity"


def compute_point(cfg: ExperimentConfig) -> TransferResult:
    if cfg.model.n_qubits == 2:
        return compute_energy_transfer(cfg)
    return compute_state_transfer(cfg)


SweepOutput = Tuple[Dict[str, Any], Optional[pd.DataFrame], Dict[str, Any]]


def _sweep_row(payload: Tuple[Dict[str, Any], str, float, str]) -> SweepOutput:
    """Una fila del barrido; corre en un proceso del pool (argumentos serializables)."""
    data, axis, value, observable = payload
    cfg = ExperimentConfig.model_validate(data)
    row: Dict[str, Any] = {"sweep_value": value}
    try:
        cfg = cfg.with_model(cfg.model.with_axis(axis, value))
        result = compute_point(cfg)
    except (FlujoError, ValueError) as e:
        row.update({"steady_value": math.nan, "t_half": math.nan, "t_reached": math.nan,
                    "residual": math.nan, "converged": False, "error": f"{type(e).__name__}: {e}"})
        row.update(param_columns(cfg.model))
        row.update(axis_columns(cfg.model, axis, value))
        return row, None, cfg.resolved()
    if observable not in result.frame.columns:
        raise ConfigError(f"Observable '{observable}' inexistente; columnas: {', '.join(result.frame.columns)}")
    row.update({
        "steady_value": float(result.frame[observable].iloc[-1]),
        "t_half": result.summary["t_half"],
        "t_reached": result.summary["t_reached"],
        "residual": result.summary["residual"],
        "converged": bool(result.summary["converged"]),
        "error": "",
    })
    row.update(param_columns(cfg.model))
    return row, result.frame, cfg.resolved()


def run_sweep(cfg: ExperimentConfig, out_dir: Optional[Path] = None, workers: int = 1) -> pd.DataFrame:
    """
    Ejecuta el barrido y escribe ``<name>_sweep.csv`` más una serie por punto
    (``<name>_point<k>.csv``).

    Returns:
        DataFrame con una fila por valor, en el orden de ``sweep.values``
    """
    if cfg.sweep is None:
        raise ConfigError("Falta la sección 'sweep'")
    observable = cfg.sweep.observable or default_observable(cfg)
    base = cfg.resolved()
    payloads = [(base, cfg.sweep.axis, float(v), observable) for v in cfg.sweep.values]

    logger.info("Barrido '%s': %d puntos, %d worker(s)", cfg.sweep.axis, len(payloads), workers)
    if workers > 1 and len(payloads) > 1:
        with Pool(processes=min(workers, len(payloads))) as pool:
            outputs = pool.map(_sweep_row, payloads)
    else:
        outputs = [_sweep_row(p) for p in payloads]

    rows: List[Dict[str, Any]] = []
    target = cfg.output_dir(out_dir)
    config_hash = cfg.config_hash()
    for k, (row, frame, resolved) in enumerate(outputs):
        if row["error"]:
            logger.warning("Punto %s=%s falló: %s", cfg.sweep.axis, row["sweep_value"], row["error"])
        elif frame is not None:
            header = header_lines("sweep-point", config_hash, resolved,
                                  {"axis": cfg.sweep.axis, "sweep_value": row["sweep_value"]})
            write_csv(target / f"{cfg.name}_point{k}.csv", frame, header)
        rows.append(row)

    table = pd.DataFrame(rows)
    ordered = SUMMARY_COLUMNS + [c for c in table.columns if c not in SUMMARY_COLUMNS]
    table = table[ordered]
    header = header_lines("sweep", config_hash, cfg.resolved(),
                          {"axis": cfg.sweep.axis, "observable": observable})
    write_csv(target / f"{cfg.name}_sweep.csv", table, header)
    return table
