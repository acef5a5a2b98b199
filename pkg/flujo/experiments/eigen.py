"""
Informe del sistema propio vestido y de las reglas de selección.

``<name>_eigen.csv``: una fila por estado vestido y par.
``<name>_selection.csv``: θ, elementos de transición, desajuste de resonancia,
predicción de transferencia y desviaciones frente a ``eigh``.
"""

import logging
from pathlib import Path
from typing import Optional, Tuple

import pandas as pd

from flujo.core.analysis import (
    default_horizon,
    pair_eigensystems,
    resonance_detuning,
    transfer_rate,
    transition_elements,
    verify_against_numeric,
)
from flujo.core.model import TWO_PI, pair_params
from flujo.experiments.config import ExperimentConfig
from flujo.experiments.results import header_lines, param_columns, write_csv

logger = logging.getLogger(__name__)

COMPONENT_LABELS = ("uu", "ud", "du", "dd")


def compute_eigen_report(cfg: ExperimentConfig) -> Tuple[pd.DataFrame, pd.DataFrame]:
    eigen_rows, selection_rows = [], []
    for (first, second), eig in pair_eigensystems(cfg.model).items():
        params = pair_params(cfg.model, first)
        pair = f"{first + 1}{second + 1}"
        for k in range(4):
            row = {"pair": pair, "state": f"E{k + 1}",
                   "energy": float(eig.energies[k]), "energy_f": float(eig.energies_f[k])}
            for label, amp in zip(COMPONENT_LABELS, eig.vectors[:, k]):
                row[f"c_{label}"] = float(amp.real)
            eigen_rows.append(row)

        elements = transition_elements(params)
        report = verify_against_numeric(params, eig)
        row = {
            "pair": pair,
            "theta": eig.theta,
            "cos_theta": eig.cos_theta,
            "sin_theta": eig.sin_theta,
            "m23_f": elements.m23 / TWO_PI,
            "m34_f": elements.m34 / TWO_PI,
            "m12_f": elements.m12 / TWO_PI,
            "splitting_f": eig.splitting_f,
            "resonance_detuning": resonance_detuning(params),
            "predicted_transfer": eig.predicted_transfer,
            "transfer_rate": transfer_rate(params),
            "default_horizon": default_horizon(params, cfg.integrator.max_horizon),
            "energy_deviation": report.energy_deviation,
            "vector_deviation": report.vector_deviation,
            "numeric_ok": report.ok,
        }
        row.update(param_columns(cfg.model))
        selection_rows.append(row)
        if not report.ok:
            logger.warning("Par %s: desviación analítico/numérica por encima de %.0e", pair, report.tolerance)
    return pd.DataFrame(eigen_rows), pd.DataFrame(selection_rows)


def run_eigen_report(cfg: ExperimentConfig, out_dir: Optional[Path] = None) -> Tuple[pd.DataFrame, pd.DataFrame]:
    eigen, selection = compute_eigen_report(cfg)
    target = cfg.output_dir(out_dir)
    header = header_lines("eigen-report", cfg.config_hash(), cfg.resolved())
    write_csv(target / f"{cfg.name}_eigen.csv", eigen, header)
    write_csv(target / f"{cfg.name}_selection.csv", selection, header)
    return eigen, selection
