"""
Diagnósticos escalares sobre matrices densidad.

Subespacio lógico de un par (a, b) de qubits: |0_L⟩ = |↑↓⟩, |1_L⟩ = |↓↑⟩, que en
la base de dos qubits son los índices 1 y 2.
"""

import cmath
import logging
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

from flujo.core import linalg
from flujo.core.analysis import analytic_eigensystem
from flujo.core.errors import ContractError, IntegrityError, ParameterError, ShapeError
from flujo.core.hilbert import (
    PROJ_UP,
    FockCutoff,
    SpaceLayout,
    embed,
    flat_index,
    number_operator,
    partial_trace,
)
from flujo.core.linalg import ComplexMatrix
from flujo.core.model import ModelParams, pair_params, total_excitation

logger = logging.getLogger(__name__)

IMAG_TOL = 1e-9
PROBABILITY_TOL = 1e-9

LOGICAL_ZERO = 1
LOGICAL_ONE = 2


@dataclass(frozen=True)
class ObservableSpec:
    """Observable con nombre sobre el layout completo."""

    name: str
    operator: ComplexMatrix

    def __post_init__(self) -> None:
        op = linalg.as_matrix(self.operator)
        herm = linalg.hermiticity_error(op)
        if herm > linalg.HERMITIAN_TOL:
            raise ContractError(f"Observable '{self.name}' no hermítico (max|O - O†| = {herm:.3e})")
        op.setflags(write=False)
        object.__setattr__(self, "operator", op)


@dataclass(frozen=True)
class DerivedScalar:
    """Escalar no lineal en ρ (fidelidades optimizadas, coherencias, pureza) registrado junto a los observables."""

    name: str
    fn: Callable[[ComplexMatrix], float]


Recordable = Union[ObservableSpec, DerivedScalar]


def measure(rho: ComplexMatrix, item: Recordable) -> float:
    if isinstance(item, DerivedScalar):
        return float(item.fn(rho))
    return expectation(rho, item)


def expectation(rho: ComplexMatrix, spec: ObservableSpec) -> float:
    """Tr(ρ·O); un residuo imaginario mayor que 1e-9 se considera corrupción de ρ."""
    if rho.shape != spec.operator.shape:
        raise ShapeError(f"ρ {rho.shape} y '{spec.name}' {spec.operator.shape} no coinciden")
    value = complex(np.einsum("ij,ji->", rho, spec.operator))
    if abs(value.imag) > IMAG_TOL:
        raise IntegrityError(f"⟨{spec.name}⟩ con parte imaginaria {value.imag:.3e}")
    return value.real


def excitation_observable(layout: SpaceLayout, site: int) -> ObservableSpec:
    """P_e del qubit ``site``: |↑⟩⟨↑| embebido. Nombre ``p_e<site+1>``."""
    layout.check_qubit(site)
    return ObservableSpec(f"p_e{site + 1}", embed(layout, site, PROJ_UP))


def photon_number_observable(layout: SpaceLayout) -> ObservableSpec:
    if not layout.has_cavity:
        raise ParameterError("El layout no tiene cavidad")
    n_max = layout.dims[-1] - 1
    return ObservableSpec("photons", embed(layout, layout.cavity_site, number_operator(FockCutoff(n_max=n_max))))


def excitation_total_observable(layout: SpaceLayout) -> ObservableSpec:
    return ObservableSpec("qubit_excitation", total_excitation(layout))


def dressed_population_observable(params: ModelParams, layout: SpaceLayout, index: int) -> ObservableSpec:
    """
    Población del estado vestido |E_index⟩ (1..4) del par (1, 2).

    Los qubits 1 y 2 son los dos factores más lentos, así que el proyector se
    extiende con la identidad sobre el resto del layout.
    """
    if not 1 <= index <= 4:
        raise ParameterError(f"Estado vestido E{index} inexistente (1..4)")
    eig = analytic_eigensystem(pair_params(params, 0))
    v = eig.vectors[:, index - 1:index]
    rest = layout.total_dim // 4
    return ObservableSpec(f"p_E{index}", linalg.kron(v @ v.conj().T, np.eye(rest)))


def _qubit_state(layout: SpaceLayout, rho: ComplexMatrix) -> ComplexMatrix:
    rho = linalg.as_matrix(rho)
    if rho.shape != (layout.total_dim, layout.total_dim):
        raise ShapeError(f"ρ {rho.shape} no coincide con la dimensión {layout.total_dim}")
    return partial_trace(layout, rho, layout.qubit_sites) if layout.has_cavity else rho


def _transfer_targets(layout: SpaceLayout) -> Tuple[int, int]:
    """Índices de |↓↑↓↓⟩ (|0_L⟩ en 2,4) y |↓↓↓↑⟩ (|1_L⟩ en 2,4) en la base de cuatro qubits."""
    if layout.n_qubits != 4:
        raise ParameterError(f"Se requiere un layout de cuatro qubits, hay {layout.n_qubits}")
    qubits = SpaceLayout.qubits(4)
    return flat_index(qubits, (1, 0, 1, 1)), flat_index(qubits, (1, 1, 1, 0))


def transfer_fidelity(rho: ComplexMatrix, layout: SpaceLayout, alpha: complex, beta: complex) -> float:
    """
    F = ⟨ψ|ρ_q|ψ⟩ con |ψ⟩ = |↓↓⟩₁₃ (α|↑↓⟩₂₄ + β|↓↑⟩₂₄) y ρ_q el estado de los
    qubits (equivale a Tr[ρ·(|ψ⟩⟨ψ| ⊗ I_cav)]). Sin corrección de fase.
    """
    a, b = _transfer_targets(layout)
    rho_q = _qubit_state(layout, rho)
    ket = np.zeros(16, dtype=np.complex128)
    ket[a], ket[b] = alpha, beta
    return float(np.real(ket.conj() @ rho_q @ ket))


def bell_fidelity(rho: ComplexMatrix, layout: SpaceLayout) -> float:
    """Fidelidad con |↓↓⟩₁₃ (|↑↓⟩₂₄ + |↓↑⟩₂₄)/√2."""
    amp = 1.0 / np.sqrt(2.0)
    return transfer_fidelity(rho, layout, amp, amp)


def phase_optimized_fidelity(
    rho: ComplexMatrix, layout: SpaceLayout, alpha: complex, beta: complex
) -> Tuple[float, float]:
    """
    max_φ F(α, e^{iφ}β) y el φ que lo alcanza.

    F(φ) = |α|²ρ_aa + |β|²ρ_bb + 2 Re(ᾱβ e^{iφ} ρ_ab), así que el máximo es
    |α|²ρ_aa + |β|²ρ_bb + 2|αβρ_ab| en φ = -arg(ᾱβρ_ab).
    """
    a, b = _transfer_targets(layout)
    rho_q = _qubit_state(layout, rho)
    cross = np.conj(alpha) * beta * rho_q[a, b]
    base = abs(alpha) ** 2 * rho_q[a, a].real + abs(beta) ** 2 * rho_q[b, b].real
    phi = -cmath.phase(cross) if abs(cross) > 0 else 0.0
    return float(base + 2.0 * abs(cross)), float(phi)


def logical_populations(
    rho: ComplexMatrix, layout: SpaceLayout, pair: Tuple[int, int]
) -> Tuple[float, float, complex]:
    """(p00, p11, ⟨0_L|ρ_par|1_L⟩) del par de qubits (a, b) con a < b."""
    first, second = (int(s) for s in pair)
    if first >= second:
        raise ParameterError(f"Par inválido {pair}: se espera (a, b) con a < b")
    layout.check_qubit(first)
    layout.check_qubit(second)
    rho_pair = partial_trace(layout, rho, (first, second))
    return (
        float(rho_pair[LOGICAL_ZERO, LOGICAL_ZERO].real),
        float(rho_pair[LOGICAL_ONE, LOGICAL_ONE].real),
        complex(rho_pair[LOGICAL_ZERO, LOGICAL_ONE]),
    )


def purity(rho: ComplexMatrix) -> float:
    """Tr(ρ²)."""
    rho = linalg.as_matrix(rho)
    return float(np.real(np.einsum("ij,ji->", rho, rho)))


def clamp_probability(name: str, value: float) -> float:
    """Recorta a [0, 1] registrando el valor crudo."""
    if 0.0 <= value <= 1.0:
        return float(value)
    if -PROBABILITY_TOL <= value <= 1.0 + PROBABILITY_TOL:
        logger.debug("%s=%.3e recortado a [0, 1]", name, value)
    else:
        logger.warning("%s=%.6g fuera de [0, 1] más allá de la tolerancia; se recorta", name, value)
    return float(min(1.0, max(0.0, value)))
