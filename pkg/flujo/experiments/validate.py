"""
Módulo Validate - suites de invariantes y oráculos del simulador.

Cada check devuelve (ok, detalle). El conjunto completo se muestra en una tabla
Rich y se escribe en ``validate_report.csv``; cualquier fallo hace que la CLI
salga con código 2.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from flujo.core import linalg
from flujo.core.analysis import analytic_eigensystem, transition_elements, verify_against_numeric
from flujo.core.dynamics import check_state
from flujo.core.errors import ConfigError, FlujoError
from flujo.core.hilbert import site_permutation
from flujo.core.model import ModelParams, build_four_qubit, build_two_qubit, hamiltonian_parts, total_excitation
from flujo.experiments.common import TransferResult
from flujo.experiments.config import ExperimentConfig, RunSettings
from flujo.experiments.energy import compute_energy_transfer
from flujo.experiments.results import header_lines, write_csv

logger = logging.getLogger(__name__)

OPERATOR_TOL = 1e-12
SELECTION_TOL = 1e-14
M23_TOL = 1e-12
EIGEN_TOL = 1e-9
TRANSFER_THRESHOLD = 0.99
PREDICTION_TOL = 0.005
CONSERVATION_TOL = 1e-7
UNITARY_TOL = 1e-6
CUTOFF_TOL = 1e-6
RANDOM_DRAWS = 100
UNIFORM_RUN_TIME = 5.0

CheckResult = Tuple[bool, str]


class ValidationContext:
    """Parámetros base y resultados compartidos (calculados una sola vez)."""

    def __init__(self, cfg: ExperimentConfig):
        if cfg.model.n_qubits != 2:
            raise ConfigError("validate usa parámetros base de dos qubits")
        self.cfg = cfg
        self.params = cfg.model
        self.rng = np.random.default_rng(cfg.validate_.seed)
        self.inject_fault = cfg.validate_.inject_fault

    @property
    def paired(self) -> ModelParams:
        d, j = self.params.detunings, self.params.couplings
        data = self.params.model_dump()
        data.update(detunings=[d[0], d[1], d[0], d[1]], couplings=[j[0], j[1], j[0], j[1]], paired=True)
        return ModelParams(**data)

    def _transfer(self, params: ModelParams, run: RunSettings) -> TransferResult:
        cfg = self.cfg.model_copy(update={"model": params, "run": run, "experiment": "energy-transfer"})
        return compute_energy_transfer(cfg)

    @cached_property
    def baseline(self) -> TransferResult:
        return self._transfer(self.params, RunSettings(steady_state=True))

    def random_params(self) -> ModelParams:
        delta, g = self.rng.uniform(0.1, 20.0, size=2)
        j1, j2 = self.rng.uniform(0.0, 3.0, size=2)
        data = self.params.model_dump()
        data.update(detunings=[float(delta), 0.0], g=float(g), couplings=[float(j1), float(j2)])
        return ModelParams(**data)


def check_eigen_numeric(ctx: ValidationContext) -> CheckResult:
    base = verify_against_numeric(ctx.params, analytic_eigensystem(ctx.params))
    worst = max(base.energy_deviation, base.vector_deviation)
    if not base.ok:
        return False, f"parámetros base: desviación {worst:.2e}"
    for _ in range(RANDOM_DRAWS):
        p = ctx.random_params()
        r = verify_against_numeric(p, analytic_eigensystem(p), tolerance=EIGEN_TOL)
        worst = max(worst, r.energy_deviation, r.vector_deviation)
        if not r.ok:
            return False, f"Δ={p.detunings[0]:.4g}, g={p.g:.4g}: desviación {worst:.2e}"
    return True, f"max desviación {worst:.2e}"


def check_selection_rules(ctx: ValidationContext) -> CheckResult:
    worst_m34, worst_m23 = 0.0, 0.0
    for _ in range(RANDOM_DRAWS):
        p = ctx.random_params()
        eig = analytic_eigensystem(p)
        m = transition_elements(p)
        worst_m34 = max(worst_m34, abs(m.m34), abs(m.m12))
        expected = eig.sin_theta * (p.couplings[0] - p.couplings[1])
        worst_m23 = max(worst_m23, abs(m.m23 / (2.0 * math.pi) - expected))
    ok = worst_m34 <= SELECTION_TOL and worst_m23 <= M23_TOL
    return ok, f"max|m34|,|m12| = {worst_m34:.1e}; max|m23 - sinθ(J1-J2)| = {worst_m23:.1e}"


def check_hamiltonians(ctx: ValidationContext) -> CheckResult:
    details = []
    for label, system in (("2q", build_two_qubit(ctx.params)), ("4q", build_four_qubit(ctx.paired))):
        h = system.hamiltonian
        herm = linalg.hermiticity_error(h)
        comm = linalg.norm_max(linalg.commutator(h, total_excitation(system.layout)))
        if herm > OPERATOR_TOL or comm > OPERATOR_TOL:
            return False, f"{label}: |H-H†|={herm:.1e}, |[H,Σσz]|={comm:.1e}"
        details.append(f"{label} ok")
    return True, ", ".join(details)


def check_uniform_commutation(ctx: ValidationContext) -> CheckResult:
    j = ctx.params.couplings[0]
    data = ctx.params.model_dump()
    data["couplings"] = [j, j]
    parts = hamiltonian_parts(ModelParams(**data))
    comm = linalg.norm_max(linalg.commutator(parts["qubit"], parts["interaction"]))
    return comm <= OPERATOR_TOL, f"|[H_qubit, H_I]| = {comm:.1e} con J1=J2={j:g}"


def check_swap_symmetry(ctx: ValidationContext) -> CheckResult:
    system = build_four_qubit(ctx.paired)
    p = site_permutation(system.layout, (2, 3, 0, 1, 4))
    dev = linalg.norm_max(p @ system.hamiltonian @ p.conj().T - system.hamiltonian)
    return dev <= OPERATOR_TOL, f"|PHP† - H| = {dev:.1e}"


def check_baseline_transfer(ctx: ValidationContext) -> CheckResult:
    s = ctx.baseline.summary
    ok = s["steady_value"] >= TRANSFER_THRESHOLD and bool(s["converged"])
    return ok, f"P_e2 = {s['steady_value']:.6f}, residuo {s['residual']:.1e}, t = {s['t_reached']:.4g}"


def check_dressed_prediction(ctx: ValidationContext) -> CheckResult:
    s = ctx.baseline.summary
    gap = abs(s["steady_value"] - s["predicted_transfer"])
    return gap <= PREDICTION_TOL, f"|P_ss - cos²(θ/2)| = {gap:.2e}"


def check_conservation(ctx: ValidationContext) -> CheckResult:
    s = ctx.baseline.summary
    ok = s["excitation_drift"] < CONSERVATION_TOL and s["max_trace_error"] < CONSERVATION_TOL
    return ok, f"deriva Σσz = {s['excitation_drift']:.1e}, max|Tr ρ - 1| = {s['max_trace_error']:.1e}"


def check_uniform_null_result(ctx: ValidationContext) -> CheckResult:
    j = ctx.params.couplings[0]
    data = ctx.params.model_dump()
    data["couplings"] = [j, j]
    run = RunSettings(steady_state=False, t_final=UNIFORM_RUN_TIME, reference_unitary=True)
    dev = ctx._transfer(ModelParams(**data), run).summary["unitary_deviation"]
    return dev < UNITARY_TOL, f"max|P_e2 - P_e2(unitaria)| = {dev:.1e} hasta t={UNIFORM_RUN_TIME:g}"


def check_cutoff_convergence(ctx: ValidationContext) -> CheckResult:
    data = ctx.params.model_dump()
    n_max = ctx.params.cutoff.n_max
    data["cutoff"] = {"n_max": n_max + 2}
    wider = ctx._transfer(ModelParams(**data), RunSettings(steady_state=True))
    gap = abs(wider.summary["steady_value"] - ctx.baseline.summary["steady_value"])
    return gap < CUTOFF_TOL, f"|ΔP_e2| (n_max {n_max} → {n_max + 2}) = {gap:.1e}"


def check_record_integrity(ctx: ValidationContext) -> CheckResult:
    steady = ctx.baseline.steady
    rho = steady.rho.copy() if steady is not None else None
    if rho is None:
        return False, "sin estado estacionario"
    if ctx.inject_fault:
        # control negativo: ρ deja de ser hermítica
        rho[0, 1] += 1e-3j
    try:
        err = check_state(rho, steady.t_reached)
    except FlujoError as e:
        return False, str(e)
    return True, f"|Tr ρ - 1| = {err:.1e}"


CHECKS: Dict[str, Callable[[ValidationContext], CheckResult]] = {
    "eigen_numeric": check_eigen_numeric,
    "selection_rules": check_selection_rules,
    "hamiltonians": check_hamiltonians,
    "uniform_commutation": check_uniform_commutation,
    "swap_symmetry": check_swap_symmetry,
    "baseline_transfer": check_baseline_transfer,
    "dressed_prediction": check_dressed_prediction,
    "conservation": check_conservation,
    "uniform_null_result": check_uniform_null_result,
    "cutoff_convergence": check_cutoff_convergence,
    "record_integrity": check_record_integrity,
}


@dataclass
class ValidationReport:
    results: List[Tuple[str, bool, str]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.results)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.results, columns=["check", "passed", "detail"])


def run_validate(
    cfg: ExperimentConfig,
    console: Optional[Console] = None,
    out_dir: Optional[Path] = None,
) -> ValidationReport:
    """
    Ejecuta los checks seleccionados (todos por defecto).

    Args:
        cfg: configuración con los parámetros base de dos qubits
        console: Console de Rich para la tabla de resultados
        out_dir: directorio de salida de ``validate_report.csv``

    Returns:
        ValidationReport con (check, ok, detalle) en orden de registro
    """
    names = cfg.validate_.checks or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ConfigError(f"Checks desconocidos: {', '.join(unknown)} (disponibles: {', '.join(CHECKS)})")

    if console:
        console.print(Panel.fit("[bold cyan]Validate - invariantes y oráculos[/bold cyan]", border_style="cyan"))
        if cfg.validate_.inject_fault:
            console.print("[yellow]Control negativo activado: se corrompe la hermiticidad[/yellow]")

    ctx = ValidationContext(cfg)
    results = []
    for name in names:
        try:
            ok, detail = CHECKS[name](ctx)
        except FlujoError as e:
            ok, detail = False, f"{type(e).__name__}: {e}"
        logger.debug("check %s: %s (%s)", name, ok, detail)
        results.append((name, bool(ok), detail))
    report = ValidationReport(results)

    if console:
        table = Table(show_header=True, header_style="bold cyan")
        table.add_column("Check", style="cyan")
        table.add_column("Estado", style="green")
        table.add_column("Detalles", style="yellow")
        for name, ok, detail in results:
            table.add_row(name, "[green]✔[/green]" if ok else "[red]✘[/red]", detail)
        console.print(table)
        if report.passed:
            console.print("\n[bold green]✅ Todas las validaciones pasaron[/bold green]")
        else:
            console.print("\n[yellow]⚠️ Algunas validaciones fallaron[/yellow]")

    header = header_lines("validate", cfg.config_hash(), cfg.resolved())
    write_csv(cfg.output_dir(out_dir) / "validate_report.csv", report.frame(), header)
    return report
