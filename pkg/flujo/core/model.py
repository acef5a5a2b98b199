"""
Hamiltonianos y operador de colapso del modelo (marco rotante, ħ = 1).

Todos los parámetros públicos están en unidades de frecuencia ordinaria (los
valores "/2π"); internamente cada tasa se multiplica por 2π y el tiempo se mide
en el inverso de esas unidades.
"""

import logging
import math
import re
from typing import Dict, List, NamedTuple, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from flujo.core.errors import ParameterError
from flujo.core.hilbert import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    FockCutoff,
    SpaceLayout,
    annihilator,
    embed,
    number_operator,
)
from flujo.core.linalg import ComplexMatrix

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
PAIRING_TOL = 1e-12

# flip-flop por número de qubits: pares (j, j+1) acoplados por g
FLIP_FLOP_PAIRS = {2: ((0, 1),), 4: ((0, 1), (2, 3))}

AXIS_PATTERN = re.compile(r"^(detunings|couplings)\[(\d+)\]$")
SCALAR_AXES = ("g", "omega_c", "kappa", "cutoff")


class ModelParams(BaseModel):
    """Parámetros físicos del modelo de dos o cuatro qubits."""

    model_config = ConfigDict(frozen=True)

    detunings: List[float] = Field(..., description="δω_q^(j)/2π, uno por qubit")
    g: float = Field(..., description="Acoplamiento flip-flop qubit-qubit /2π")
    omega_c: float = Field(..., description="Frecuencia de la cavidad ω_c/2π")
    couplings: List[float] = Field(..., description="J_j/2π, uno por qubit")
    kappa: float = Field(..., ge=0.0, description="Tasa de pérdida de fotones κ/2π")
    cutoff: FockCutoff = Field(default_factory=FockCutoff)
    paired: bool = Field(False, description="Exigir δω1=δω3, δω2=δω4, J1=J3, J2=J4")

    @model_validator(mode="after")
    def check_invariants(self) -> "ModelParams":
        n = len(self.detunings)
        if n not in FLIP_FLOP_PAIRS:
            raise ValueError(f"Se admiten 2 o 4 qubits, se recibieron {n} desintonías")
        if len(self.couplings) != n:
            raise ValueError("'couplings' debe tener la misma longitud que 'detunings'")
        if self.cutoff.n_max < 1:
            raise ValueError("cutoff.n_max debe ser >= 1 para una dinámica disipativa")
        if self.paired:
            if n != 4:
                raise ValueError("'paired' solo aplica al modelo de cuatro qubits")
            if not self.pairing_holds():
                raise ValueError("Restricción de pares violada: δω1=δω3, δω2=δω4, J1=J3, J2=J4")
        return self

    def pairing_holds(self) -> bool:
        """δω1=δω3, δω2=δω4, J1=J3, J2=J4 (solo cuatro qubits)."""
        if len(self.detunings) != 4:
            return False
        d, j = self.detunings, self.couplings
        return all(abs(x[k] - x[k + 2]) <= PAIRING_TOL for x in (d, j) for k in (0, 1))

    @property
    def n_qubits(self) -> int:
        return len(self.detunings)

    def layout(self) -> SpaceLayout:
        return SpaceLayout.qubits(self.n_qubits, self.cutoff)

    def with_axis(self, axis: str, value: float) -> "ModelParams":
        """
        Copia con un parámetro reemplazado (eje de barrido).

        Ejes válidos: ``g``, ``omega_c``, ``kappa``, ``cutoff`` (n_max) y
        ``detunings[j]`` / ``couplings[j]``. Con ``paired`` el compañero j±2
        también se actualiza.
        """
        data = self.model_dump()
        if axis in SCALAR_AXES:
            data[axis] = {"n_max": int(value)} if axis == "cutoff" else float(value)
            return ModelParams(**data)
        match = AXIS_PATTERN.match(axis)
        if not match:
            raise ParameterError(f"Eje de barrido desconocido: '{axis}'")
        field, index = match.group(1), int(match.group(2))
        if index >= self.n_qubits:
            raise ParameterError(f"Índice {index} fuera de rango para {self.n_qubits} qubits")
        values = list(data[field])
        values[index] = float(value)
        if self.paired:
            values[(index + 2) % 4] = float(value)
        data[field] = values
        return ModelParams(**data)


class OpenSystem(NamedTuple):
    """Resultado de los constructores: (H, colapso, layout)."""

    hamiltonian: ComplexMatrix
    collapse: ComplexMatrix
    layout: SpaceLayout


def _freeze(m: ComplexMatrix) -> ComplexMatrix:
    m.setflags(write=False)
    return m


def _flip_flop(layout: SpaceLayout, i: int, j: int) -> ComplexMatrix:
    """σ₊^(i)σ₋^(j) + σ₋^(i)σ₊^(j)."""
    return (embed(layout, i, SIGMA_PLUS) @ embed(layout, j, SIGMA_MINUS)
            + embed(layout, i, SIGMA_MINUS) @ embed(layout, j, SIGMA_PLUS))


def total_excitation(layout: SpaceLayout) -> ComplexMatrix:
    """Σ_j σ_z^(j) sobre todos los qubits del layout."""
    out = np.zeros((layout.total_dim, layout.total_dim), dtype=np.complex128)
    for site in layout.qubit_sites:
        out += embed(layout, site, SIGMA_Z)
    return out


def _qubit_terms(params: ModelParams, layout: SpaceLayout) -> ComplexMatrix:
    h = np.zeros((layout.total_dim, layout.total_dim), dtype=np.complex128)
    for site, dw in enumerate(params.detunings):
        h += 0.5 * TWO_PI * dw * embed(layout, site, SIGMA_Z)
    for i, j in FLIP_FLOP_PAIRS[params.n_qubits]:
        h += TWO_PI * params.g * _flip_flop(layout, i, j)
    return h


def hamiltonian_parts(params: ModelParams) -> Dict[str, ComplexMatrix]:
    """Términos ``qubit``, ``cavity`` e ``interaction`` sobre el layout completo."""
    layout = params.layout()
    cav = layout.cavity_site
    a = embed(layout, cav, annihilator(params.cutoff))
    quadrature = a + a.conj().T
    coupling = np.zeros_like(quadrature)
    for site, jj in enumerate(params.couplings):
        coupling += TWO_PI * jj * embed(layout, site, SIGMA_Z)
    return {
        "qubit": _qubit_terms(params, layout),
        "cavity": TWO_PI * params.omega_c * embed(layout, cav, number_operator(params.cutoff)),
        "interaction": quadrature @ coupling,
    }


def qubit_hamiltonian(params: ModelParams) -> Tuple[ComplexMatrix, SpaceLayout]:
    """H_qubit sobre el layout solo de qubits (sin cavidad)."""
    layout = SpaceLayout.qubits(params.n_qubits)
    return _qubit_terms(params, layout), layout


def _build(params: ModelParams) -> OpenSystem:
    layout = params.layout()
    parts = hamiltonian_parts(params)
    h = parts["qubit"] + parts["cavity"] + parts["interaction"]
    collapse = math.sqrt(TWO_PI * params.kappa) * embed(layout, layout.cavity_site, annihilator(params.cutoff))
    logger.debug("Sistema construido: %d qubits, dim=%d", params.n_qubits, layout.total_dim)
    return OpenSystem(_freeze(h), _freeze(collapse), layout)


def build_two_qubit(params: ModelParams) -> OpenSystem:
    """H del modelo de dos qubits sobre el layout (2, 2, n_max+1)."""
    if params.n_qubits != 2:
        raise ParameterError(f"build_two_qubit requiere 2 qubits, hay {params.n_qubits}")
    return _build(params)


def build_four_qubit(params: ModelParams) -> OpenSystem:
    """H_QT de cuatro qubits (flip-flop en los pares (1,2) y (3,4)) sobre (2, 2, 2, 2, n_max+1)."""
    if params.n_qubits != 4:
        raise ParameterError(f"build_four_qubit requiere 4 qubits, hay {params.n_qubits}")
    if not params.pairing_holds():
        raise ParameterError("Restricción de pares violada: δω1=δω3, δω2=δω4, J1=J3, J2=J4")
    return _build(params)


def build_system(params: ModelParams) -> OpenSystem:
    """Despacha según el número de qubits."""
    if params.n_qubits == 2:
        return build_two_qubit(params)
    return build_four_qubit(params)


def pair_params(params: ModelParams, first_site: int) -> ModelParams:
    """Parámetros de dos qubits del par (first_site, first_site + 1)."""
    if params.n_qubits == 2 and first_site == 0:
        return params
    if params.n_qubits != 4 or first_site not in (0, 2):
        raise ParameterError(f"Par inválido que empieza en {first_site} para {params.n_qubits} qubits")
    s = slice(first_site, first_site + 2)
    return ModelParams(
        detunings=params.detunings[s],
        g=params.g,
        omega_c=params.omega_c,
        couplings=params.couplings[s],
        kappa=params.kappa,
        cutoff=params.cutoff,
    )
