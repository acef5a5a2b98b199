"""
Contabilidad del espacio de Hilbert compuesto.

Convenciones fijas para todo el paquete:

- Orden de factores: el sitio 0 es el factor más a la izquierda (índice lento),
  igual que la notación |σσ̃⟩₁₂ leída de izquierda a derecha.
- Espín: |↑⟩ es el nivel 0 y |↓⟩ el nivel 1; σ_z|↑⟩ = +|↑⟩.
- La cavidad, si existe, es siempre el último factor (dimensión n_max + 1).
"""

import string
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from flujo.core.errors import ParameterError, ShapeError
from flujo.core.linalg import ComplexMatrix, as_matrix, kron

UP = 0
DOWN = 1

IDENTITY2 = np.eye(2, dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
# σ₊ = |↑⟩⟨↓|, σ₋ = |↓⟩⟨↑|
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)
PROJ_UP = np.array([[1, 0], [0, 0]], dtype=np.complex128)
PROJ_DOWN = np.array([[0, 0], [0, 1]], dtype=np.complex128)


class FockCutoff(BaseModel):
    """Truncamiento del espacio de Fock: se conservan |0⟩ … |n_max⟩."""

    model_config = ConfigDict(frozen=True)

    n_max: int = Field(6, ge=0, description="Mayor número de fotones conservado")

    @model_validator(mode="before")
    @classmethod
    def coerce_int(cls, v: Any) -> Any:
        """Permite escribir ``cutoff: 6`` en los YAML."""
        if isinstance(v, int) and not isinstance(v, bool):
            return {"n_max": v}
        return v

    @property
    def dim(self) -> int:
        return self.n_max + 1


@dataclass(frozen=True)
class SpaceLayout:
    """
    Disposición ordenada de subsistemas.

    ``dims`` lista las dimensiones de cada factor; si ``has_cavity`` es True el
    último factor es la cavidad y todos los demás son qubits (dimensión 2).
    """

    dims: Tuple[int, ...]
    has_cavity: bool = False

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims or any(d < 1 for d in dims):
            raise ParameterError(f"Dimensiones inválidas: {dims}")
        if int(np.prod(dims)) < 2:
            raise ParameterError("La dimensión total debe ser al menos 2")
        qubit_dims = dims[:-1] if self.has_cavity else dims
        if any(d != 2 for d in qubit_dims):
            raise ParameterError(f"Todos los factores salvo la cavidad deben ser qubits: {dims}")

    @classmethod
    def qubits(cls, n: int, cutoff: Optional[FockCutoff] = None) -> "SpaceLayout":
        """n qubits y, opcionalmente, una cavidad truncada al final."""
        if cutoff is None:
            return cls(dims=(2,) * n)
        return cls(dims=(2,) * n + (cutoff.dim,), has_cavity=True)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def n_qubits(self) -> int:
        return self.n_sites - 1 if self.has_cavity else self.n_sites

    @property
    def cavity_site(self) -> Optional[int]:
        return self.n_sites - 1 if self.has_cavity else None

    @property
    def qubit_sites(self) -> Tuple[int, ...]:
        return tuple(range(self.n_qubits))

    def check_site(self, site: int) -> None:
        if not 0 <= site < self.n_sites:
            raise ParameterError(f"Sitio {site} fuera de rango (0..{self.n_sites - 1})")

    def check_qubit(self, site: int) -> None:
        self.check_site(site)
        if site == self.cavity_site:
            raise ParameterError(f"El sitio {site} es la cavidad, no un qubit")


def embed(layout: SpaceLayout, site: int, op: ComplexMatrix) -> ComplexMatrix:
    """I ⊗ … ⊗ op ⊗ … ⊗ I con ``op`` en la posición ``site``."""
    layout.check_site(site)
    op = as_matrix(op)
    d = layout.dims[site]
    if op.shape != (d, d):
        raise ShapeError(f"Operador {op.shape} no coincide con la dimensión {d} del sitio {site}")
    left = int(np.prod(layout.dims[:site], dtype=int))
    right = int(np.prod(layout.dims[site + 1:], dtype=int))
    out = kron(np.eye(left), op) if left > 1 else op
    return kron(out, np.eye(right)) if right > 1 else out


def annihilator(cutoff: FockCutoff) -> ComplexMatrix:
    """Operador a truncado: a[n-1, n] = √n."""
    return np.diag(np.sqrt(np.arange(1, cutoff.dim)), 1).astype(np.complex128)


def number_operator(cutoff: FockCutoff) -> ComplexMatrix:
    """a†a = diag(0, 1, …, n_max)."""
    return np.diag(np.arange(cutoff.dim)).astype(np.complex128)


def flat_index(layout: SpaceLayout, labels: Sequence[int]) -> int:
    """Índice plano en base mixta (sitio 0 más significativo)."""
    if len(labels) != layout.n_sites:
        raise ParameterError(f"Se esperaban {layout.n_sites} etiquetas, se recibieron {len(labels)}")
    for site, (label, d) in enumerate(zip(labels, layout.dims)):
        if not 0 <= int(label) < d:
            raise ParameterError(f"Etiqueta {label} fuera de rango en el sitio {site} (dim {d})")
    return int(np.ravel_multi_index(tuple(int(x) for x in labels), layout.dims))


def basis_state(layout: SpaceLayout, labels: Sequence[int]) -> ComplexMatrix:
    """Vector columna de la base computacional con las etiquetas dadas."""
    ket = np.zeros((layout.total_dim, 1), dtype=np.complex128)
    ket[flat_index(layout, labels), 0] = 1.0
    return ket


def ket_to_dm(ket: ComplexMatrix) -> ComplexMatrix:
    """|ψ⟩⟨ψ| normalizado."""
    ket = as_matrix(np.reshape(ket, (-1, 1)))
    ket = ket / np.linalg.norm(ket)
    return ket @ ket.conj().T


def partial_trace(layout: SpaceLayout, rho: ComplexMatrix, keep: Iterable[int]) -> ComplexMatrix:
    """
    Matriz densidad reducida sobre los sitios ``keep`` (en orden ascendente).

    Se reestructura ρ como tensor de 2n índices y se contraen los sitios
    descartados con ``numpy.einsum``.
    """
    rho = as_matrix(rho)
    keep = sorted(set(int(s) for s in keep))
    if not keep:
        raise ParameterError("El conjunto de sitios a conservar está vacío")
    for s in keep:
        layout.check_site(s)
    if rho.shape != (layout.total_dim, layout.total_dim):
        raise ShapeError(f"ρ {rho.shape} no coincide con la dimensión {layout.total_dim}")
    if len(keep) == layout.n_sites:
        return rho.copy()

    n = layout.n_sites
    letters = string.ascii_letters
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for s in range(n):
        if s not in keep:
            cols[s] = rows[s]
    out = "".join(rows[s] for s in keep) + "".join(cols[s] for s in keep)
    tensor = rho.reshape(layout.dims + layout.dims)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, tensor)
    dk = int(np.prod([layout.dims[s] for s in keep]))
    return reduced.reshape(dk, dk)


def site_permutation(layout: SpaceLayout, perm: Sequence[int]) -> ComplexMatrix:
    """
    Matriz de permutación P que reordena los factores: el factor en la posición
    ``perm[k]`` pasa a la posición ``k``. P·A·P† expresa A en el nuevo orden.
    """
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(layout.n_sites)):
        raise ParameterError(f"Permutación inválida: {perm}")
    if any(layout.dims[p] != layout.dims[k] for k, p in enumerate(perm)):
        raise ParameterError("La permutación debe conservar las dimensiones de cada posición")
    d = layout.total_dim
    index = np.arange(d).reshape(layout.dims)
    source = np.transpose(index, perm).reshape(-1)
    p = np.zeros((d, d), dtype=np.complex128)
    p[np.arange(d), source] = 1.0
    return p
