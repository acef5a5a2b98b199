"""
Resolución de rutas de salida y de presets.

- output_root(): directorio por defecto de resultados (FLUJO_OUTPUT_ROOT o ./results).
- presets_dir(): directorio de presets YAML incluidos en el paquete.
- default_workers(): tamaño por defecto del pool de barridos (FLUJO_WORKERS).

El core NO escribe en disco; solo expone estas rutas. Quien escribe es la capa
de experimentos.
"""

import os
from pathlib import Path

DEFAULT_OUTPUT_ROOT = Path("results")


def output_root() -> Path:
    """Raíz de resultados: FLUJO_OUTPUT_ROOT si está definida, si no ./results."""
    explicit = os.environ.get("FLUJO_OUTPUT_ROOT", "").strip()
    if explicit:
        return Path(explicit).expanduser().resolve()
    return (Path.cwd() / DEFAULT_OUTPUT_ROOT).resolve()


def presets_dir() -> Path:
    # flujo/core/runtime/resolver.py → flujo/experiments/presets
    return Path(__file__).resolve().parents[2] / "experiments" / "presets"


def default_workers() -> int:
    raw = os.environ.get("FLUJO_WORKERS", "").strip()
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1
