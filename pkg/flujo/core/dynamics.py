"""
Evolución de Lindblad, propagación cerrada y detección de estado estacionario.

Ecuación integrada (ħ = 1, tasas ya multiplicadas por 2π en ``model``):

    dρ/dt = -i[H, ρ] + LρL† - ½(L†Lρ + ρL†L)

Métodos disponibles (``IntegratorConfig.method``):

- ``rk45`` / ``dop853``: pares Runge-Kutta embebidos de scipy sobre ρ aplanada.
- ``propagator``: exponencial exacta del generador por bloques conexos del
  espacio, aplicada una vez por intervalo de registro.
- ``auto`` (por defecto): ``propagator`` si todos los bloques poblados caben
  en ``MAX_BLOCK_SUPEROPERATOR``; si no, ``rk45``. El ruido de paso de los
  pares Runge-Kutta deja el residuo max|dρ/dt| en torno a 1e-6, por encima del
  ``ss_tol`` habitual, así que ``steady_state`` solo converge con el propagador.

Todas las trayectorias se muestrean en la misma malla de registro
(``record_stride``) y cada punto registrado pasa por ``check_state``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import DOP853, RK45
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from flujo.core import linalg
from flujo.core.errors import ContractError, IntegrationError, IntegrityError, ParameterError, ShapeError
from flujo.core.linalg import ComplexMatrix
from flujo.core.observables import Recordable, measure

logger = logging.getLogger(__name__)

# Umbrales sobre puntos registrados
TRACE_TOL = 1e-7
HERMITICITY_TOL = 1e-7
POSITIVITY_TOL = 1e-6

# Umbrales sobre el estado inicial
INPUT_TRACE_TOL = 1e-8
INPUT_HERMITICITY_TOL = 1e-8
INPUT_POSITIVITY_TOL = 1e-10

# Mayor superoperador de bloque que el método ``propagator`` acepta exponenciar
MAX_BLOCK_SUPEROPERATOR = 2048

_STEPPERS = {"rk45": RK45, "dop853": DOP853}


class IntegratorConfig(BaseModel):
    """Parámetros del integrador y de la malla de registro."""

    model_config = ConfigDict(frozen=True)

    method: Literal["auto", "rk45", "dop853", "propagator"] = "auto"
    rel_tol: float = Field(1e-8, gt=0.0)
    abs_tol: float = Field(1e-10, gt=0.0)
    max_step: Optional[float] = Field(None, gt=0.0, description="Paso máximo de rk45/dop853; None = sin límite")
    record_stride: float = Field(0.05, gt=0.0, description="Espaciado de la malla de salida")
    ss_tol: float = Field(1e-9, gt=0.0, description="Umbral de max|dρ/dt| para el estado estacionario")
    horizon: Optional[float] = Field(None, gt=0.0, description="Duración máxima de steady_state; None = estimada")
    max_horizon: float = Field(2e4, gt=0.0)
    keep_states: bool = False


@dataclass
class Trajectory:
    """Malla temporal, observables registrados y, opcionalmente, instantáneas de ρ."""

    times: NDArray[np.float64]
    records: Dict[str, NDArray[np.float64]]
    final_state: ComplexMatrix
    states: Optional[List[ComplexMatrix]] = None
    max_trace_error: float = 0.0
    method: str = "rk45"
    n_steps: int = 0

    def frame(self) -> pd.DataFrame:
        """DataFrame con la columna ``t`` seguida de cada observable."""
        data = {"t": self.times}
        data.update(self.records)
        return pd.DataFrame(data)


@dataclass
class SteadyState:
    """Resultado de ``steady_state``; ``converged`` es False si se agotó el horizonte."""

    rho: ComplexMatrix
    t_reached: float
    residual: float
    converged: bool
    trajectory: Trajectory = field(repr=False)

    def as_tuple(self) -> Tuple[ComplexMatrix, float, float]:
        return self.rho, self.t_reached, self.residual


class LindbladGenerator:
    """Lado derecho de la ecuación maestra para un (H, L) fijo."""

    def __init__(self, hamiltonian: ComplexMatrix, collapse: ComplexMatrix):
        h = linalg.as_matrix(hamiltonian)
        c = linalg.as_matrix(collapse)
        if h.shape[0] != h.shape[1] or h.shape != c.shape:
            raise ShapeError(f"H {h.shape} y L {c.shape} deben ser cuadradas y de igual dimensión")
        if not linalg.is_hermitian(h):
            raise ContractError("El hamiltoniano debe ser hermítico")
        self.hamiltonian = h
        self.collapse = c
        self.dim = h.shape[0]
        self._dissipative = bool(np.any(c))
        self._collapse_dag = c.conj().T
        self._loss = self._collapse_dag @ c

    def __call__(self, rho: ComplexMatrix) -> ComplexMatrix:
        out = -1j * (self.hamiltonian @ rho - rho @ self.hamiltonian)
        if self._dissipative:
            out += self.collapse @ rho @ self._collapse_dag
            out -= 0.5 * (self._loss @ rho + rho @ self._loss)
        return out


def lindblad_rhs(hamiltonian: ComplexMatrix, collapse: ComplexMatrix, rho: ComplexMatrix) -> ComplexMatrix:
    """
    dρ/dt para un único estado.

    Raises:
        ShapeError: dimensiones incompatibles
        ContractError: ρ no hermítica dentro de 1e-8 o H no hermítico
    """
    gen = LindbladGenerator(hamiltonian, collapse)
    rho = linalg.as_matrix(rho)
    if rho.shape != (gen.dim, gen.dim):
        raise ShapeError(f"ρ {rho.shape} no coincide con la dimensión {gen.dim}")
    herm = linalg.hermiticity_error(rho)
    if herm > INPUT_HERMITICITY_TOL:
        raise ContractError(f"ρ no es hermítica (max|ρ - ρ†| = {herm:.3e})")
    return gen(rho)


def _support_min_eigenvalue(rho: ComplexMatrix) -> float:
    # filas/columnas exactamente nulas aportan autovalor 0
    support = np.flatnonzero(np.abs(rho).sum(axis=1) > 0)
    if support.size == 0:
        return 0.0
    sub = linalg.hermitian_part(rho[np.ix_(support, support)])
    values, _ = linalg.eigh(sub)
    return float(values[0])


def validate_density_matrix(rho: ComplexMatrix) -> ComplexMatrix:
    """Comprueba traza unidad, hermiticidad y positividad de un estado de entrada."""
    rho = linalg.as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"ρ debe ser cuadrada, forma {rho.shape}")
    trace_err = abs(linalg.trace(rho) - 1.0)
    if trace_err > INPUT_TRACE_TOL:
        raise ContractError(f"Tr ρ difiere de 1 en {trace_err:.3e}")
    herm = linalg.hermiticity_error(rho)
    if herm > INPUT_HERMITICITY_TOL:
        raise ContractError(f"ρ no es hermítica (max|ρ - ρ†| = {herm:.3e})")
    min_eig = _support_min_eigenvalue(rho)
    if min_eig < -INPUT_POSITIVITY_TOL:
        raise ContractError(f"ρ no es semidefinida positiva (λ_min = {min_eig:.3e})")
    return rho


def check_state(rho: ComplexMatrix, t: float) -> float:
    """
    Verifica un punto registrado de la trayectoria.

    Returns:
        |Tr ρ - 1| en ese punto

    Raises:
        IntegrityError: traza, hermiticidad o positividad fuera de umbral
    """
    trace_err = abs(complex(np.trace(rho)) - 1.0)
    if trace_err > TRACE_TOL:
        raise IntegrityError(f"t={t:.6g}: |Tr ρ - 1| = {trace_err:.3e} > {TRACE_TOL:g}")
    herm = linalg.hermiticity_error(rho)
    if herm > HERMITICITY_TOL:
        raise IntegrityError(f"t={t:.6g}: max|ρ - ρ†| = {herm:.3e} > {HERMITICITY_TOL:g}")
    min_eig = _support_min_eigenvalue(rho)
    if min_eig < -POSITIVITY_TOL:
        raise IntegrityError(f"t={t:.6g}: λ_min(ρ) = {min_eig:.3e} < -{POSITIVITY_TOL:g}")
    return trace_err


def record_grid(t_start: float, t_stop: float, stride: float) -> NDArray[np.float64]:
    """t_start, t_start + stride, … y t_stop exacto como último punto."""
    if t_stop < t_start:
        raise ParameterError(f"t_final ({t_stop}) anterior al inicio ({t_start})")
    n = int(math.floor((t_stop - t_start) / stride + 1e-9))
    times = t_start + stride * np.arange(n + 1, dtype=np.float64)
    if t_stop - times[-1] > 1e-9 * stride:
        times = np.append(times, t_stop)
    else:
        times[-1] = t_stop
    return times


# ---------------------------------------------------------------------------
# Flujos de estados sobre la malla de registro
# ---------------------------------------------------------------------------

class _StepCounter:
    def __init__(self) -> None:
        self.steps = 0


def _runge_kutta_stream(
    gen: LindbladGenerator,
    rho0: ComplexMatrix,
    times: NDArray[np.float64],
    cfg: IntegratorConfig,
    counter: _StepCounter,
    method: str,
) -> Iterator[Tuple[float, ComplexMatrix]]:
    d = gen.dim
    yield float(times[0]), rho0
    if times.size == 1:
        return

    def fun(_t: float, y: NDArray[np.complex128]) -> NDArray[np.complex128]:
        return gen(y.reshape(d, d)).reshape(-1)

    solver = _STEPPERS[method](
        fun, float(times[0]), rho0.reshape(-1).copy(), float(times[-1]),
        max_step=cfg.max_step or np.inf, rtol=cfg.rel_tol, atol=cfg.abs_tol,
    )
    k = 1
    while k < times.size:
        message = solver.step()
        counter.steps += 1
        if solver.status == "failed":
            raise IntegrationError(
                f"El integrador {method} falló: {message}",
                {"t": solver.t, "step": solver.step_size, "method": method, "dim": d, "steps": counter.steps},
            )
        if k < times.size and times[k] <= solver.t:
            interpolant = solver.dense_output()
            while k < times.size and times[k] <= solver.t:
                y = solver.y if times[k] == solver.t else interpolant(times[k])
                yield float(times[k]), np.asarray(y).reshape(d, d)
                k += 1
        if solver.status == "finished" and k < times.size:
            raise IntegrationError(
                f"El integrador terminó en t={solver.t:.6g} antes del último registro",
                {"t": solver.t, "method": method, "dim": d, "steps": counter.steps},
            )


@dataclass
class _Block:
    rows: NDArray[np.intp]
    cols: NDArray[np.intp]
    generator: ComplexMatrix
    state: NDArray[np.complex128]


class BlockPropagator:
    """
    Propagador exacto e^{𝓛·dt} restringido a los bloques poblados de ρ.

    El espacio se parte en componentes conexas del grafo |H| + |L|; H y L son
    diagonales por bloques en esa partición, así que cada bloque ρ_{cc'} evoluciona
    por separado con un superoperador de tamaño |c|·|c'| (vectorización fila-mayor,
    vec(AXB) = (A ⊗ Bᵀ) vec X).
    """

    def __init__(self, gen: LindbladGenerator, rho0: ComplexMatrix, max_block: int = MAX_BLOCK_SUPEROPERATOR):
        h, c = gen.hamiltonian, gen.collapse
        graph = (np.abs(h) > 0) | (np.abs(c) > 0) | (np.abs(c).T > 0)
        n_comp, labels = connected_components(csr_matrix(graph), directed=False)
        components = [np.flatnonzero(labels == k) for k in range(n_comp)]
        self.dim = gen.dim
        self.blocks: List[_Block] = []
        for ci in components:
            for cj in components:
                sub = rho0[np.ix_(ci, cj)]
                if not np.any(sub):
                    continue
                size = ci.size * cj.size
                if size > max_block:
                    raise IntegrationError(
                        f"Bloque de superoperador {size}x{size} demasiado grande para 'propagator'; use rk45",
                        {"block": size, "limit": max_block, "method": "propagator", "dim": self.dim},
                    )
                generator = self._superoperator(h[np.ix_(ci, ci)], c[np.ix_(ci, ci)],
                                                h[np.ix_(cj, cj)], c[np.ix_(cj, cj)])
                self.blocks.append(_Block(ci, cj, generator, sub.reshape(-1).copy()))
        self._cache: Dict[float, List[ComplexMatrix]] = {}
        logger.debug("Propagador por bloques: %d componentes, %d bloques poblados", n_comp, len(self.blocks))

    @staticmethod
    def _superoperator(h_i: ComplexMatrix, l_i: ComplexMatrix, h_j: ComplexMatrix, l_j: ComplexMatrix) -> ComplexMatrix:
        eye_i = np.eye(h_i.shape[0], dtype=np.complex128)
        eye_j = np.eye(h_j.shape[0], dtype=np.complex128)
        n_i = l_i.conj().T @ l_i
        n_j = l_j.conj().T @ l_j
        return (-1j * (linalg.kron(h_i, eye_j) - linalg.kron(eye_i, h_j.T))
                + linalg.kron(l_i, l_j.conj())
                - 0.5 * (linalg.kron(n_i, eye_j) + linalg.kron(eye_i, n_j.T)))

    def advance(self, dt: float) -> None:
        key = round(dt, 10)
        steps = self._cache.get(key)
        if steps is None:
            steps = [linalg.expm(b.generator, key) for b in self.blocks]
            self._cache[key] = steps
        for block, step in zip(self.blocks, steps):
            block.state = step @ block.state

    def state(self) -> ComplexMatrix:
        rho = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for b in self.blocks:
            rho[np.ix_(b.rows, b.cols)] = b.state.reshape(b.rows.size, b.cols.size)
        return rho


def _propagator_stream(
    prop: BlockPropagator,
    rho0: ComplexMatrix,
    times: NDArray[np.float64],
    counter: _StepCounter,
) -> Iterator[Tuple[float, ComplexMatrix]]:
    yield float(times[0]), rho0
    for k in range(1, times.size):
        prop.advance(float(times[k] - times[k - 1]))
        counter.steps += 1
        yield float(times[k]), prop.state()


def _stream(
    gen: LindbladGenerator,
    rho0: ComplexMatrix,
    times: NDArray[np.float64],
    cfg: IntegratorConfig,
    counter: _StepCounter,
) -> Tuple[Iterator[Tuple[float, ComplexMatrix]], str]:
    """Flujo de estados y método efectivo (``auto`` se resuelve aquí)."""
    if cfg.method in ("auto", "propagator"):
        try:
            prop = BlockPropagator(gen, rho0, MAX_BLOCK_SUPEROPERATOR)
        except IntegrationError as e:
            if cfg.method == "propagator":
                raise
            logger.info("auto: bloque %s > %s, se integra con rk45", e.diagnostic.get("block"), e.diagnostic.get("limit"))
            return _runge_kutta_stream(gen, rho0, times, cfg, counter, "rk45"), "rk45"
        return _propagator_stream(prop, rho0, times, counter), "propagator"
    return _runge_kutta_stream(gen, rho0, times, cfg, counter, cfg.method), cfg.method


class _Recorder:
    """Acumula observables, instantáneas y el peor error de traza."""

    def __init__(self, observables: Sequence[Recordable], keep_states: bool):
        self.specs = list(observables)
        names = [s.name for s in self.specs]
        if len(set(names)) != len(names):
            raise ParameterError(f"Nombres de observables repetidos: {names}")
        self.times: List[float] = []
        self.values: Dict[str, List[float]] = {n: [] for n in names}
        self.states: Optional[List[ComplexMatrix]] = [] if keep_states else None
        self.max_trace_error = 0.0

    def add(self, t: float, rho: ComplexMatrix) -> None:
        self.max_trace_error = max(self.max_trace_error, check_state(rho, t))
        self.times.append(t)
        for spec in self.specs:
            self.values[spec.name].append(measure(rho, spec))
        if self.states is not None:
            self.states.append(rho.copy())

    def build(self, final_state: ComplexMatrix, method: str, n_steps: int) -> Trajectory:
        return Trajectory(
            times=np.asarray(self.times, dtype=np.float64),
            records={k: np.asarray(v, dtype=np.float64) for k, v in self.values.items()},
            final_state=final_state,
            states=self.states,
            max_trace_error=self.max_trace_error,
            method=method,
            n_steps=n_steps,
        )


def evolve(
    hamiltonian: ComplexMatrix,
    collapse: ComplexMatrix,
    rho0: ComplexMatrix,
    t_final: float,
    cfg: Optional[IntegratorConfig] = None,
    observables: Sequence[Recordable] = (),
    t_start: float = 0.0,
) -> Trajectory:
    """
    Integra la ecuación maestra de ``t_start`` a ``t_final``.

    Args:
        hamiltonian: H en unidades angulares
        collapse: operador de salto L (matriz nula para evolución cerrada)
        rho0: estado inicial válido
        t_final: instante final (inverso de las unidades de frecuencia)
        cfg: integrador y malla de registro
        observables: observables evaluados en cada punto registrado

    Returns:
        Trajectory con la malla de registro completa

    Raises:
        IntegrationError: fallo del paso adaptativo o bloque demasiado grande
        IntegrityError: un punto registrado rompe traza, hermiticidad o positividad
    """
    cfg = cfg or IntegratorConfig()
    gen = LindbladGenerator(hamiltonian, collapse)
    rho0 = validate_density_matrix(rho0)
    if rho0.shape[0] != gen.dim:
        raise ShapeError(f"ρ0 {rho0.shape} no coincide con la dimensión {gen.dim}")
    times = record_grid(t_start, t_final, cfg.record_stride)
    logger.debug("evolve: método=%s dim=%d registros=%d", cfg.method, gen.dim, times.size)

    recorder = _Recorder(observables, cfg.keep_states)
    counter = _StepCounter()
    rho = rho0
    stream, method = _stream(gen, rho0, times, cfg, counter)
    for t, rho in stream:
        recorder.add(t, rho)
    logger.info("evolve terminado: t=%.6g, %d pasos (%s)", times[-1], counter.steps, method)
    return recorder.build(rho.copy(), method, counter.steps)


def steady_state(
    hamiltonian: ComplexMatrix,
    collapse: ComplexMatrix,
    rho0: ComplexMatrix,
    cfg: Optional[IntegratorConfig] = None,
    observables: Sequence[Recordable] = (),
    t_start: float = 0.0,
    horizon: Optional[float] = None,
) -> SteadyState:
    """
    Integra hasta que max|dρ/dt| < ``cfg.ss_tol`` o se agota el horizonte.

    El estado estacionario devuelto es el alcanzable desde ``rho0``: dentro de
    un sector de excitación fijo depende del estado inicial. El residuo se
    evalúa en cada punto de la malla de registro. ``horizon`` (o, en su
    defecto, ``cfg.horizon`` y luego ``cfg.max_horizon``) es la duración
    máxima medida desde ``t_start``.
    """
    cfg = cfg or IntegratorConfig()
    gen = LindbladGenerator(hamiltonian, collapse)
    rho0 = validate_density_matrix(rho0)
    if rho0.shape[0] != gen.dim:
        raise ShapeError(f"ρ0 {rho0.shape} no coincide con la dimensión {gen.dim}")
    duration = horizon or cfg.horizon or cfg.max_horizon
    duration = min(duration, cfg.max_horizon)
    times = record_grid(t_start, t_start + duration, cfg.record_stride)

    recorder = _Recorder(observables, cfg.keep_states)
    counter = _StepCounter()
    converged = False
    rho, t, residual = rho0, t_start, math.inf
    stream, method = _stream(gen, rho0, times, cfg, counter)
    for t, rho in stream:
        recorder.add(t, rho)
        residual = linalg.norm_max(gen(rho))
        if residual < cfg.ss_tol:
            converged = True
            break
    stream.close()

    if converged:
        logger.info("Estado estacionario en t=%.6g (residuo %.3e)", t, residual)
    else:
        logger.warning("Sin convergencia al estado estacionario en t=%.6g (residuo %.3e > %.1e)",
                       t, residual, cfg.ss_tol)
    trajectory = recorder.build(rho.copy(), method, counter.steps)
    return SteadyState(rho=rho.copy(), t_reached=float(t), residual=float(residual),
                       converged=converged, trajectory=trajectory)


def propagate_unitary(
    hamiltonian: ComplexMatrix,
    rho0: ComplexMatrix,
    times: Sequence[float],
) -> List[ComplexMatrix]:
    """U(t)ρ0U(t)† con U(t) = e^{-iHt}, para cada instante de ``times``."""
    h = linalg.as_matrix(hamiltonian)
    rho0 = linalg.as_matrix(rho0)
    if rho0.shape != h.shape:
        raise ShapeError(f"ρ0 {rho0.shape} no coincide con H {h.shape}")
    values, vectors = linalg.eigh(h)
    out = []
    for t in times:
        u = (vectors * np.exp(-1j * values * float(t))) @ vectors.conj().T
        out.append(u @ rho0 @ u.conj().T)
    return out
