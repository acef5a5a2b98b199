"""Rutas de runtime (resultados, presets)."""

from flujo.core.runtime.resolver import default_workers, output_root, presets_dir

__all__ = ["output_root", "presets_dir", "default_workers"]
