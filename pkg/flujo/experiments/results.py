"""
Escritura de resultados en CSV.

Cada archivo empieza con un bloque de comentarios ``#`` (experimento, hash de la
configuración, unidades y parámetros resueltos) seguido de la tabla. No se
escriben marcas de tiempo: la misma configuración produce los mismos bytes.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

import pandas as pd

from flujo.core.model import AXIS_PATTERN, SCALAR_AXES, ModelParams

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"

UNITS = {
    "t": "1/f (inverso de la frecuencia ordinaria)",
    "t_half": "1/f",
    "t_reached": "1/f",
    "p_*": "probabilidad",
    "photons": "fotones",
    "qubit_excitation": "Σ⟨σ_z⟩ (adimensional)",
    "purity": "Tr ρ²",
    "energy_f": "f (frecuencia ordinaria)",
    "energy": "rad/tiempo",
    "m*_f": "f",
    "residual": "max|dρ/dt| (rad/tiempo)",
}


def param_columns(params: ModelParams) -> Dict[str, Any]:
    """Parámetros resueltos como columnas planas (una por qubit en listas)."""
    cols: Dict[str, Any] = {}
    for j, value in enumerate(params.detunings, start=1):
        cols[f"detuning_{j}"] = value
    cols["g"] = params.g
    cols["omega_c"] = params.omega_c
    for j, value in enumerate(params.couplings, start=1):
        cols[f"coupling_{j}"] = value
    cols["kappa"] = params.kappa
    cols["n_max"] = params.cutoff.n_max
    return cols


def axis_columns(params: ModelParams, axis: str, value: float) -> Dict[str, Any]:
    """Columnas de ``param_columns`` que el eje ``axis`` fija a ``value`` (con el compañero j±2 si hay pares)."""
    if axis == "cutoff":
        return {"n_max": int(value)}
    if axis in SCALAR_AXES:
        return {axis: value}
    match = AXIS_PATTERN.match(axis)
    if not match:
        return {}
    prefix = "detuning" if match.group(1) == "detunings" else "coupling"
    index = int(match.group(2))
    sites = {index, (index + 2) % 4} if params.paired else {index}
    return {f"{prefix}_{s + 1}": value for s in sorted(sites) if s < params.n_qubits}


def header_lines(experiment: str, config_hash: str, resolved: Mapping[str, Any], extra: Optional[Mapping[str, Any]] = None) -> List[str]:
    lines = [
        f"experiment: {experiment}",
        f"config_hash: {config_hash}",
        "units: " + json.dumps(UNITS, ensure_ascii=False, sort_keys=True),
        "config: " + json.dumps(resolved, ensure_ascii=False, sort_keys=True, separators=(",", ":")),
    ]
    for key, value in (extra or {}).items():
        lines.append(f"{key}: {value}")
    return lines


def write_csv(path: Path, frame: pd.DataFrame, header: Iterable[str]) -> Path:
    """Escribe ``# línea`` por cada entrada de ``header`` y luego la tabla."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        for line in header:
            f.write(f"# {line}\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("Resultado escrito: %s (%d filas)", path, len(frame))
    return path


def read_csv(path: Path) -> pd.DataFrame:
    """Lee un CSV de resultados ignorando el bloque de comentarios."""
    return pd.read_csv(path, comment="#")


def read_header(path: Path) -> Dict[str, str]:
    out: Dict[str, str] = {}
    with open(path, "r") as f:
        for line in f:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition(": ")
            out[key] = value
    return out
