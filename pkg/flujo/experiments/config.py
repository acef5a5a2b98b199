"""
Configuración de experimentos: esquema pydantic y cargador YAML.

Un archivo de configuración describe un experimento completo (modelo,
integrador, estado inicial, barrido y salida). ``--config`` acepta una ruta o
el nombre de un preset incluido: ``energy_transfer`` y ``state_transfer``
(una corrida), ``coupling_ratio``, ``cavity_detuning``, ``coupling_strength`` y
``bell_transfer`` (barridos) y ``validate``.
"""

import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from flujo.core.dynamics import IntegratorConfig
from flujo.core.errors import ConfigError, FlujoError
from flujo.core.model import ModelParams
from flujo.core.runtime import output_root, presets_dir

logger = logging.getLogger(__name__)

ExperimentKind = Literal["energy-transfer", "state-transfer", "eigen-report", "sweep", "validate"]

NORMALIZATION_TOL = 1e-9


def _as_pair(value: Any) -> Any:
    """Admite un número, un ``complex`` o ``[re, im]``; devuelve ``(re, im)``."""
    if value is None:
        return value
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError("Un complejo se escribe como número o como [re, im]")
        return float(value[0]), float(value[1])
    z = complex(value)
    return z.real, z.imag


class RunSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    t_final: float = Field(20.0, gt=0.0, description="Duración cuando steady_state es false")
    steady_state: bool = True
    reference_unitary: bool = False


class InitialStateSpec(BaseModel):
    """Etiquetas de base por qubit (0 = ↑, 1 = ↓) o superposición lógica (α, β)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    labels: Optional[List[int]] = None
    alpha: Optional[Tuple[float, float]] = None
    beta: Optional[Tuple[float, float]] = None
    cavity_level: int = Field(0, ge=0)

    @field_validator("alpha", "beta", mode="before")
    @classmethod
    def parse_complex(cls, v: Any) -> Any:
        return _as_pair(v)

    @field_validator("labels")
    @classmethod
    def check_labels(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        if v is not None and any(x not in (0, 1) for x in v):
            raise ValueError(f"Las etiquetas de qubit deben ser 0 (↑) o 1 (↓): {v}")
        return v

    @model_validator(mode="after")
    def check_amplitudes(self) -> "InitialStateSpec":
        has_amp = self.alpha is not None or self.beta is not None
        if has_amp and self.labels is not None:
            raise ValueError("Use 'labels' o 'alpha'/'beta', no ambos")
        if has_amp:
            if self.alpha is None or self.beta is None:
                raise ValueError("'alpha' y 'beta' deben darse juntos")
            alpha, beta = self.amplitudes
            norm = abs(alpha) ** 2 + abs(beta) ** 2
            if abs(norm - 1.0) > NORMALIZATION_TOL:
                raise ValueError(f"|α|² + |β|² = {norm:.12g} ≠ 1")
        return self

    @property
    def amplitudes(self) -> Tuple[complex, complex]:
        if self.alpha is None or self.beta is None:
            amp = 1.0 / math.sqrt(2.0)
            return complex(amp), complex(amp)
        return complex(*self.alpha), complex(*self.beta)


class SweepSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    axis: str
    values: List[float] = Field(..., min_length=1)
    observable: Optional[str] = Field(None, description="Columna usada como steady_value (por defecto p_e2 / infidelity)")


class ValidateSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    checks: Optional[List[str]] = Field(None, description="Subconjunto de checks; None = todos")
    inject_fault: bool = Field(False, description="Control negativo: corrompe la hermiticidad de un estado")
    seed: int = 7


class OutputSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    path: Optional[str] = None


class ExperimentConfig(BaseModel):
    """Configuración resuelta de un experimento."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: ExperimentKind
    name: str = Field("run", min_length=1)
    model: ModelParams
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    run: RunSettings = Field(default_factory=RunSettings)
    initial_state: InitialStateSpec = Field(default_factory=InitialStateSpec)
    sweep: Optional[SweepSettings] = None
    validate_: ValidateSettings = Field(default_factory=ValidateSettings, alias="validate")
    output: OutputSettings = Field(default_factory=OutputSettings)

    @model_validator(mode="after")
    def check_consistency(self) -> "ExperimentConfig":
        n = self.model.n_qubits
        if self.experiment == "energy-transfer" and n != 2:
            raise ValueError("energy-transfer requiere el modelo de dos qubits")
        if self.experiment == "state-transfer" and n != 4:
            raise ValueError("state-transfer requiere el modelo de cuatro qubits")
        if self.experiment == "sweep":
            if self.sweep is None:
                raise ValueError("El experimento 'sweep' requiere la sección 'sweep'")
            try:
                self.model.with_axis(self.sweep.axis, self.sweep.values[0])
            except FlujoError as e:
                raise ValueError(str(e)) from e
        labels = self.initial_state.labels
        if labels is not None and len(labels) != n:
            raise ValueError(f"'initial_state.labels' necesita {n} etiquetas, hay {len(labels)}")
        if self.initial_state.cavity_level > self.model.cutoff.n_max:
            raise ValueError("'initial_state.cavity_level' supera cutoff.n_max")
        return self

    def resolved(self) -> Dict[str, Any]:
        """Configuración completa con valores por defecto, serializable a YAML/JSON."""
        return self.model_dump(mode="json", by_alias=True)

    def config_hash(self) -> str:
        canonical = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def output_dir(self, override: Optional[Path] = None) -> Path:
        if override is not None:
            return Path(override)
        if self.output.path:
            return Path(self.output.path).expanduser()
        return output_root()

    def with_model(self, model: ModelParams) -> "ExperimentConfig":
        return self.model_copy(update={"model": model})


class ConfigLoader:
    """Carga y valida configuraciones de experimentos."""

    def __init__(self, presets: Optional[Path] = None):
        """
        Args:
            presets: directorio de presets (por defecto: flujo/experiments/presets)
        """
        self.presets_dir = Path(presets) if presets is not None else presets_dir()

    def resolve_path(self, ref: str) -> Path:
        """Ruta existente o nombre de preset (con o sin ``.yaml``)."""
        path = Path(ref).expanduser()
        if path.is_file():
            return path
        stem = ref[:-5] if ref.endswith(".yaml") else ref
        preset = self.presets_dir / f"{stem}.yaml"
        if preset.is_file():
            return preset
        raise ConfigError(f"Configuración no encontrada: {ref} (presets: {', '.join(self.list_presets())})")

    def load_raw(self, ref: str) -> Dict[str, Any]:
        path = self.resolve_path(ref)
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Error al parsear YAML {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: se esperaba un mapeo en la raíz")
        logger.debug("Configuración cargada: %s", path)
        return data

    def parse(self, data: Dict[str, Any], source: str = "<dict>") -> ExperimentConfig:
        try:
            return ExperimentConfig.model_validate(data)
        except ValidationError as e:
            errors = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or '<raíz>'}: {err['msg']}" for err in e.errors()
            )
            raise ConfigError(f"{source}: configuración inválida: {errors}") from e

    def load(self, ref: str) -> ExperimentConfig:
        return self.parse(self.load_raw(ref), source=ref)

    def list_presets(self) -> List[str]:
        if not self.presets_dir.exists():
            return []
        return sorted(p.stem for p in self.presets_dir.glob("*.yaml"))


def dump_config(cfg: ExperimentConfig) -> str:
    """YAML de la configuración resuelta (para ``--print-config``)."""
    return yaml.safe_dump(cfg.resolved(), sort_keys=False, allow_unicode=True)
