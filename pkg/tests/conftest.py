"""Fixtures compartidas: parámetros base y configuraciones rápidas."""

import math

import numpy as np
import pytest

from flujo.core.dynamics import IntegratorConfig
from flujo.core.hilbert import FockCutoff, SpaceLayout, annihilator, number_operator
from flujo.core.model import TWO_PI, ModelParams
from flujo.experiments.config import ExperimentConfig


@pytest.fixture
def baseline_params() -> ModelParams:
    return ModelParams(detunings=[15.0, 0.0], g=1.0, omega_c=15.0, couplings=[2.0, 1.0], kappa=3.0, cutoff=6)


@pytest.fixture
def paired_params() -> ModelParams:
    return ModelParams(
        detunings=[15.0, 0.0, 15.0, 0.0],
        g=0.25,
        omega_c=15.0,
        couplings=[2.0, 1.0, 2.0, 1.0],
        kappa=3.0,
        cutoff=4,
        paired=True,
    )


@pytest.fixture
def propagator_cfg() -> IntegratorConfig:
    return IntegratorConfig(method="propagator", record_stride=0.25)


@pytest.fixture
def damped_cavity():
    """Cavidad sola con tres niveles: (H, L, layout, ρ0 = |1⟩⟨1|, κ)."""
    kappa = 0.5
    cutoff = FockCutoff(n_max=2)
    layout = SpaceLayout(dims=(cutoff.dim,), has_cavity=True)
    h = TWO_PI * 1.0 * number_operator(cutoff)
    c = math.sqrt(TWO_PI * kappa) * annihilator(cutoff)
    rho0 = np.zeros((3, 3), dtype=np.complex128)
    rho0[1, 1] = 1.0
    return h, c, layout, rho0, kappa


def make_config(**overrides) -> ExperimentConfig:
    """Configuración de transferencia de energía con los parámetros base."""
    data = {
        "experiment": "energy-transfer",
        "name": "test",
        "model": {
            "detunings": [15.0, 0.0],
            "g": 1.0,
            "omega_c": 15.0,
            "couplings": [2.0, 1.0],
            "kappa": 3.0,
            "cutoff": 6,
        },
        "integrator": {"method": "propagator", "record_stride": 0.25},
        "run": {"steady_state": False, "t_final": 2.0},
    }
    data.update(overrides)
    return ExperimentConfig.model_validate(data)


def make_state_config(**overrides) -> ExperimentConfig:
    data = {
        "experiment": "state-transfer",
        "name": "state",
        "model": {
            "detunings": [15.0, 0.0, 15.0, 0.0],
            "g": 0.25,
            "omega_c": 15.0,
            "couplings": [2.0, 1.0, 2.0, 1.0],
            "kappa": 3.0,
            "cutoff": 4,
            "paired": True,
        },
        "integrator": {"method": "propagator", "record_stride": 0.5},
        "run": {"steady_state": False, "t_final": 2.0},
    }
    data.update(overrides)
    return ExperimentConfig.model_validate(data)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Estado mixto aleatorio de rango completo."""
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho)
