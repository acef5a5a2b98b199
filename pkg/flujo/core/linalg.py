"""
Núcleo de álgebra lineal densa compleja.

Todas las matrices son ``numpy.ndarray`` de ``complex128`` en orden fila-mayor;
el primer factor de un producto de Kronecker es el índice lento (subsistema 1 a
la izquierda). Las funciones son puras: nunca modifican sus argumentos.
"""

from typing import Tuple, Union

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from flujo.core.errors import ContractError, ShapeError

ComplexMatrix = NDArray[np.complex128]
Scalar = Union[complex, float, int]

HERMITIAN_TOL = 1e-10


def as_matrix(m: ArrayLike) -> ComplexMatrix:
    """Convierte a matriz compleja 2-D con entradas finitas."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise ShapeError(f"Se esperaba una matriz 2-D, se recibió ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ContractError("La matriz contiene NaN o Inf")
    return arr


def _require_square(m: ComplexMatrix, name: str = "matriz") -> None:
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} debe ser cuadrada, forma {m.shape}")


def matmul(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """Producto matricial estándar con verificación de dimensiones."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: {a.shape} x {b.shape} incompatibles")
    return a @ b


def kron(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """Producto de Kronecker; ``a`` es el factor lento."""
    return np.kron(as_matrix(a), as_matrix(b))


def adjoint(m: ArrayLike) -> ComplexMatrix:
    return as_matrix(m).conj().T


def trace(m: ArrayLike) -> complex:
    m = as_matrix(m)
    _require_square(m)
    return complex(np.trace(m))


def commutator(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """[a, b] = ab - ba."""
    return matmul(a, b) - matmul(b, a)


def norm_max(m: ArrayLike) -> float:
    """Máximo valor absoluto entre entradas."""
    arr = np.asarray(m)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def hermiticity_error(m: ArrayLike) -> float:
    """max |m - m†| entrada a entrada."""
    m = as_matrix(m)
    _require_square(m)
    return norm_max(m - m.conj().T)


def is_hermitian(m: ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_error(m) <= tol


def hermitian_part(m: ArrayLike) -> ComplexMatrix:
    """(m + m†)/2."""
    m = as_matrix(m)
    return 0.5 * (m + m.conj().T)


def eigh(h: ArrayLike, tol: float = HERMITIAN_TOL) -> Tuple[NDArray[np.float64], ComplexMatrix]:
    """
    Descomposición espectral de una matriz hermítica.

    Args:
        h: matriz hermítica (dentro de ``tol`` entrada a entrada)
        tol: tolerancia de hermiticidad

    Returns:
        Tuple (autovalores ascendentes, autovectores en columnas)

    Raises:
        ContractError: si ``h`` no es hermítica
    """
    h = as_matrix(h)
    _require_square(h)
    err = hermiticity_error(h)
    if err > tol:
        raise ContractError(f"eigh requiere una matriz hermítica (max|h - h†| = {err:.3e})")
    values, vectors = scipy.linalg.eigh(hermitian_part(h))
    return np.asarray(values, dtype=np.float64), np.asarray(vectors, dtype=np.complex128)


def expm(m: ArrayLike, scale: Scalar = 1.0) -> ComplexMatrix:
    """
    Exponencial matricial de ``scale * m``.

    Si ``m`` es hermítica o antihermítica se usa la descomposición espectral
    (exacta y unitaria para generadores antihermíticos); en otro caso,
    escalado y cuadrado con Padé (``scipy.linalg.expm``).
    """
    m = as_matrix(m)
    _require_square(m)
    scale = complex(scale)
    if is_hermitian(m):
        values, vectors = eigh(m)
        return (vectors * np.exp(scale * values)) @ vectors.conj().T
    if is_hermitian(1j * m):
        # m = -i K con K hermítica
        values, vectors = eigh(1j * m)
        return (vectors * np.exp(-1j * scale * values)) @ vectors.conj().T
    return np.asarray(scipy.linalg.expm(scale * m), dtype=np.complex128)
