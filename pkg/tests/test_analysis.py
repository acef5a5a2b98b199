import math

import numpy as np
import pytest

from flujo.core.analysis import (
    analytic_eigensystem,
    default_horizon,
    pair_eigensystems,
    resonance_detuning,
    transfer_rate,
    transition_elements,
    verify_against_numeric,
)
from flujo.core.errors import DegenerateAngleError, ParameterError
from flujo.core.model import TWO_PI


def test_baseline_mixing_angle(baseline_params):
    eig = analytic_eigensystem(baseline_params)
    assert eig.theta == pytest.approx(math.atan2(2.0, 15.0))
    assert eig.predicted_transfer == pytest.approx(math.cos(eig.theta / 2.0) ** 2)
    assert eig.predicted_transfer > 0.99
    assert eig.splitting_f == pytest.approx(math.hypot(15.0, 2.0))
    np.testing.assert_allclose(eig.vectors.conj().T @ eig.vectors, np.eye(4), atol=1e-15)


def test_analytic_matches_numeric(baseline_params):
    report = verify_against_numeric(baseline_params, analytic_eigensystem(baseline_params))
    assert report.ok
    assert report.energy_deviation < 1e-10


@pytest.mark.parametrize("detunings, g", [([0.0, 0.0], 1.0), ([3.0, 1.0], 0.0), ([2.0, 0.0], 1.0)])
def test_analytic_matches_numeric_at_edges(baseline_params, detunings, g):
    data = baseline_params.model_dump()
    data.update(detunings=detunings, g=g)
    params = type(baseline_params)(**data)
    assert verify_against_numeric(params, analytic_eigensystem(params)).ok


def test_degenerate_angle(baseline_params):
    data = baseline_params.model_dump()
    data.update(detunings=[1.0, 1.0], g=0.0)
    with pytest.raises(DegenerateAngleError):
        analytic_eigensystem(type(baseline_params)(**data))


def test_requires_two_qubits(paired_params):
    with pytest.raises(ParameterError):
        analytic_eigensystem(paired_params)
    eigs = pair_eigensystems(paired_params)
    assert set(eigs) == {(0, 1), (2, 3)}
    assert eigs[(0, 1)].theta == pytest.approx(eigs[(2, 3)].theta)


def test_selection_rules(baseline_params):
    eig = analytic_eigensystem(baseline_params)
    m = transition_elements(baseline_params)
    assert abs(m.m34) < 1e-14
    assert abs(m.m12) < 1e-14
    assert m.m23 / TWO_PI == pytest.approx(eig.sin_theta * (2.0 - 1.0), abs=1e-12)


def test_uniform_coupling_has_no_transition(baseline_params):
    m = transition_elements(baseline_params.with_axis("couplings[1]", 2.0))
    assert abs(m.m23) < 1e-12
    params = baseline_params.with_axis("couplings[1]", 2.0)
    assert transfer_rate(params) == 0.0
    assert default_horizon(params, 2e4) == 2e4


def test_resonance_and_rate(baseline_params):
    assert resonance_detuning(baseline_params) == pytest.approx(abs(15.0 - math.hypot(15.0, 2.0)))
    rate = transfer_rate(baseline_params)
    on_resonance = baseline_params.with_axis("omega_c", math.hypot(15.0, 2.0))
    assert transfer_rate(on_resonance) > rate > 0.0
    assert default_horizon(baseline_params, 2e4) == pytest.approx(100.0 / rate)
    assert default_horizon(baseline_params, 10.0) == 10.0


@pytest.mark.parametrize("g", [0.0, -0.0])
def test_uncoupled_inverted_pair_has_theta_pi(baseline_params, g):
    data = baseline_params.model_dump()
    data.update(detunings=[0.0, 4.0], g=g)
    params = type(baseline_params)(**data)
    eig = analytic_eigensystem(params)
    assert eig.theta == math.pi
    # |E₂⟩ es |↓↑⟩, el nivel alto cuando δω₂ > δω₁
    assert abs(eig.vectors[2, 1]) == pytest.approx(1.0)
    assert eig.predicted_transfer == pytest.approx(0.0, abs=1e-30)
    assert verify_against_numeric(params, eig).ok
