"""
Sistema propio analítico del par de qubits acoplados, reglas de selección y
estimaciones derivadas.

Base de dos qubits ordenada (↑↑, ↑↓, ↓↑, ↓↓). Con Δ = 2π(δω₁ - δω₂), G = 2πg y
r = √(Δ² + 4G²):

    |E₁⟩ = |↑↑⟩                          E₁ =  2π(δω₁ + δω₂)/2
    |E₂⟩ = cos(θ/2)|↑↓⟩ + sin(θ/2)|↓↑⟩   E₂ =  r/2
    |E₃⟩ = sin(θ/2)|↑↓⟩ - cos(θ/2)|↓↑⟩   E₃ = -r/2
    |E₄⟩ = |↓↓⟩                          E₄ = -E₁

con cos θ = Δ/r y sin θ = 2G/r. Energías y elementos de matriz en unidades
angulares; los sufijos ``_f`` indican unidades de frecuencia ordinaria.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Tuple

import numpy as np
from numpy.typing import NDArray

from flujo.core import linalg
from flujo.core.errors import DegenerateAngleError, ParameterError
from flujo.core.hilbert import SIGMA_Z, SpaceLayout, embed
from flujo.core.linalg import ComplexMatrix
from flujo.core.model import TWO_PI, ModelParams, pair_params, qubit_hamiltonian

logger = logging.getLogger(__name__)

DEVIATION_TOL = 1e-10
# separación mínima entre autovalores para tratarlos como distintos
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class EigenSystem:
    """Base vestida {E_j, |E_j⟩} y ángulo de mezcla θ."""

    theta: float
    energies: NDArray[np.float64]
    vectors: ComplexMatrix = field(repr=False)

    @property
    def cos_theta(self) -> float:
        return math.cos(self.theta)

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta)

    @property
    def energies_f(self) -> NDArray[np.float64]:
        return self.energies / TWO_PI

    @property
    def splitting_f(self) -> float:
        """(E₂ - E₃)/2π."""
        return float((self.energies[1] - self.energies[2]) / TWO_PI)

    @property
    def predicted_transfer(self) -> float:
        """cos²(θ/2) = |⟨↓↑|E₃⟩|², población final prevista del qubit 2."""
        return math.cos(self.theta / 2.0) ** 2


def _require_two_qubits(params: ModelParams) -> None:
    if params.n_qubits != 2:
        raise ParameterError(f"Se requieren parámetros de dos qubits, hay {params.n_qubits}")


def analytic_eigensystem(params: ModelParams) -> EigenSystem:
    """
    θ = atan2(2G, Δ): en [0, π) para g > 0 y en (-π, 0) para g < 0. Con g = 0
    y Δ < 0 vale exactamente π (|E₂⟩ = |↓↑⟩).

    Raises:
        ParameterError: parámetros que no son de dos qubits
        DegenerateAngleError: Δ = 0 y g = 0 (θ indefinido)
    """
    _require_two_qubits(params)
    d1, d2 = params.detunings
    delta = TWO_PI * (d1 - d2)
    # -0.0 llevaría atan2 a -π
    coupling = TWO_PI * params.g if params.g != 0.0 else 0.0
    if delta == 0.0 and coupling == 0.0:
        raise DegenerateAngleError("θ indefinido: δω₁ = δω₂ y g = 0")
    r = math.hypot(delta, 2.0 * coupling)
    theta = math.atan2(2.0 * coupling, delta)
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    e1 = TWO_PI * (d1 + d2) / 2.0

    vectors = np.zeros((4, 4), dtype=np.complex128)
    vectors[0, 0] = 1.0
    vectors[1, 1], vectors[2, 1] = c, s
    vectors[1, 2], vectors[2, 2] = s, -c
    vectors[3, 3] = 1.0
    vectors.setflags(write=False)
    energies = np.array([e1, r / 2.0, -r / 2.0, -e1], dtype=np.float64)
    energies.setflags(write=False)
    return EigenSystem(theta=theta, energies=energies, vectors=vectors)


def pair_eigensystems(params: ModelParams) -> Dict[Tuple[int, int], EigenSystem]:
    """Un sistema propio por par acoplado: (0, 1) y, con cuatro qubits, (2, 3)."""
    if params.n_qubits == 2:
        return {(0, 1): analytic_eigensystem(params)}
    return {(s, s + 1): analytic_eigensystem(pair_params(params, s)) for s in (0, 2)}


@dataclass(frozen=True)
class DeviationReport:
    """Máximas discrepancias analítico/numérico del sistema propio."""

    energy_deviation: float
    vector_deviation: float
    tolerance: float = DEVIATION_TOL

    @property
    def ok(self) -> bool:
        return self.energy_deviation < self.tolerance and self.vector_deviation < self.tolerance


def verify_against_numeric(params: ModelParams, eig: EigenSystem, tolerance: float = DEVIATION_TOL) -> DeviationReport:
    """
    Compara con ``eigh`` del hamiltoniano de dos qubits.

    La desviación de cada vector es 1 - ‖P v‖ con P el proyector sobre el
    subespacio numérico de igual energía, lo que tolera degeneraciones
    accidentales (p. ej. E₁ = E₂).
    """
    _require_two_qubits(params)
    h, _ = qubit_hamiltonian(params)
    values, vectors = linalg.eigh(h)
    energy_dev = float(np.max(np.abs(np.sort(eig.energies) - values)))

    vector_dev = 0.0
    for k in range(4):
        v = eig.vectors[:, k]
        close = np.abs(values - eig.energies[k]) <= DEGENERACY_TOL * max(1.0, abs(eig.energies[k]))
        if not np.any(close):
            vector_dev = max(vector_dev, 1.0)
            continue
        basis = vectors[:, close]
        overlap = float(np.linalg.norm(basis.conj().T @ v))
        vector_dev = max(vector_dev, abs(1.0 - overlap))
    report = DeviationReport(energy_dev, vector_dev, tolerance)
    logger.debug("verify_against_numeric: ΔE=%.2e Δv=%.2e", energy_dev, vector_dev)
    return report


class TransitionElements(NamedTuple):
    """Elementos ⟨E_i|Σ_j 2πJ_j σ_z^(j)|E_k⟩ en unidades angulares."""

    m23: float
    m34: float
    m12: float


def transition_elements(params: ModelParams) -> TransitionElements:
    """Parte de qubits de H_I en la base vestida: m23 = sin θ·2π(J₁ - J₂), m34 = m12 = 0."""
    eig = analytic_eigensystem(params)
    layout = SpaceLayout.qubits(2)
    op = sum(TWO_PI * jj * embed(layout, site, SIGMA_Z) for site, jj in enumerate(params.couplings))
    dressed = eig.vectors.conj().T @ op @ eig.vectors
    return TransitionElements(
        m23=float(dressed[1, 2].real),
        m34=float(dressed[2, 3].real),
        m12=float(dressed[0, 1].real),
    )


def resonance_detuning(params: ModelParams) -> float:
    """|ω_c - (E₂ - E₃)/2π| en unidades de frecuencia; cero es la transferencia más rápida."""
    _require_two_qubits(params)
    d1, d2 = params.detunings
    splitting = math.hypot(d1 - d2, 2.0 * params.g)
    return abs(params.omega_c - splitting)


def transfer_rate(params: ModelParams) -> float:
    """
    Tasa de la transición |E₂⟩ → |E₃⟩ inducida por la cavidad (unidades angulares):
    Γ = m23²·κ / (δ² + κ²/4), con δ el desajuste angular de resonancia.
    """
    pair = pair_params(params, 0) if params.n_qubits == 4 else params
    m23 = transition_elements(pair).m23
    kappa = TWO_PI * pair.kappa
    if m23 == 0.0 or kappa == 0.0:
        return 0.0
    mismatch = TWO_PI * resonance_detuning(pair)
    return m23 ** 2 * kappa / (mismatch ** 2 + kappa ** 2 / 4.0)


def default_horizon(params: ModelParams, max_horizon: float, factor: float = 50.0) -> float:
    """factor/κ_eff con κ_eff = Γ/2, recortado a ``max_horizon``."""
    try:
        rate = transfer_rate(params)
    except DegenerateAngleError:
        return max_horizon
    if rate <= 0.0:
        return max_horizon
    return min(factor / (rate / 2.0), max_horizon)
