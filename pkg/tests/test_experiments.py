import math

import numpy as np
import pandas as pd
import pytest

from flujo.experiments.common import initial_density, time_to_half
from flujo.experiments.eigen import run_eigen_report
from flujo.experiments.energy import compute_energy_transfer, run_energy_transfer
from flujo.experiments.results import axis_columns, read_csv, read_header
from flujo.experiments.state import compute_state_transfer, run_state_transfer
from flujo.experiments.sweep import SUMMARY_COLUMNS, run_sweep
from flujo.experiments.validate import CHECKS, run_validate

from conftest import make_config, make_state_config


def test_time_to_half_interpolates():
    times = np.array([0.0, 1.0, 2.0])
    assert time_to_half(times, np.array([0.0, 0.4, 0.8])) == pytest.approx(1.25)
    assert time_to_half(times, np.array([0.6, 0.7, 0.8])) == 0.0
    assert math.isnan(time_to_half(times, np.array([0.0, 0.1, 0.2])))


def test_initial_density_variants():
    rho = initial_density(make_config())
    assert rho[7 * 1, 7 * 1].real == pytest.approx(1.0)
    rho = initial_density(make_config(initial_state={"labels": [1, 0], "cavity_level": 2}))
    assert rho[14 + 2, 14 + 2].real == pytest.approx(1.0)
    rho = initial_density(make_state_config())
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.count_nonzero(np.abs(rho) > 1e-12) == 4


def test_energy_transfer_writes_series_and_summary(tmp_path):
    cfg = make_config()
    result = run_energy_transfer(cfg, tmp_path)
    assert [f.name for f in result.files] == ["test.csv", "test_summary.csv"]
    frame = read_csv(tmp_path / "test.csv")
    for col in ("t", "p_e1", "p_e2", "photons", "qubit_excitation", "p_E2", "p_E3", "purity"):
        assert col in frame.columns
    assert frame["t"].iloc[-1] == pytest.approx(2.0)
    assert frame["p_e1"].iloc[0] == pytest.approx(1.0)
    assert frame["p_e2"].iloc[0] == pytest.approx(0.0)
    header = read_header(tmp_path / "test.csv")
    assert header["experiment"] == "energy-transfer"
    assert header["config_hash"] == cfg.config_hash()
    summary = read_csv(tmp_path / "test_summary.csv").iloc[0]
    assert summary["excitation_drift"] < 1e-7
    assert summary["max_trace_error"] < 1e-7
    assert summary["t_reached"] == pytest.approx(2.0)
    assert not bool(summary["converged"])


def test_energy_transfer_is_deterministic(tmp_path):
    cfg = make_config()
    run_energy_transfer(cfg, tmp_path / "a")
    run_energy_transfer(cfg, tmp_path / "b")
    assert (tmp_path / "a" / "test.csv").read_bytes() == (tmp_path / "b" / "test.csv").read_bytes()


def test_uniform_coupling_matches_closed_evolution():
    cfg = make_config(run={"steady_state": False, "t_final": 5.0, "reference_unitary": True})
    cfg = cfg.with_model(cfg.model.with_axis("couplings[1]", 2.0))
    result = compute_energy_transfer(cfg)
    assert result.summary["unitary_deviation"] < 1e-6
    assert result.frame["photons"].max() < 1e-12


def test_eigen_report(tmp_path):
    cfg = make_config(experiment="eigen-report", name="eig")
    eigen, selection = run_eigen_report(cfg, tmp_path)
    assert len(eigen) == 4
    assert list(eigen["state"]) == ["E1", "E2", "E3", "E4"]
    row = selection.iloc[0]
    assert row["pair"] == "12"
    assert abs(row["m34_f"]) < 1e-14
    assert row["m23_f"] == pytest.approx(row["sin_theta"] * 1.0, abs=1e-12)
    assert row["resonance_detuning"] == pytest.approx(math.hypot(15.0, 2.0) - 15.0)
    assert bool(row["numeric_ok"])
    assert (tmp_path / "eig_eigen.csv").exists()
    assert (tmp_path / "eig_selection.csv").exists()


def test_eigen_report_four_qubits(tmp_path):
    cfg = make_state_config(experiment="eigen-report")
    _, selection = run_eigen_report(cfg, tmp_path)
    assert list(selection["pair"]) == ["12", "34"]


def test_state_transfer_short_run(tmp_path):
    cfg = make_state_config()
    result = run_state_transfer(cfg, tmp_path)
    frame = result.frame
    assert frame["fidelity"].iloc[0] == pytest.approx(0.0, abs=1e-12)
    assert frame["infidelity"].iloc[0] == pytest.approx(1.0)
    assert frame["p00_13"].iloc[0] == pytest.approx(0.5)
    assert frame["coh_13"].iloc[0] == pytest.approx(0.5)
    assert result.summary["coherence_sum_initial"] == pytest.approx(0.5)
    assert result.summary["excitation_drift"] < 1e-7
    assert (tmp_path / "state.csv").exists()
    assert (tmp_path / "state_summary.csv").exists()


def test_sweep_records_failures_per_row(tmp_path):
    cfg = make_config(
        experiment="sweep",
        name="sw",
        run={"steady_state": False, "t_final": 1.0},
        sweep={"axis": "kappa", "values": [3.0, -1.0, 1.0]},
    )
    table = run_sweep(cfg, tmp_path, workers=1)
    assert list(table.columns[: len(SUMMARY_COLUMNS)]) == SUMMARY_COLUMNS
    assert list(table["sweep_value"]) == [3.0, -1.0, 1.0]
    assert table["error"].iloc[0] == ""
    assert "ValidationError" in table["error"].iloc[1]
    assert math.isnan(table["steady_value"].iloc[1])
    assert table["kappa"].iloc[0] == 3.0
    assert table["kappa"].iloc[1] == -1.0
    assert (tmp_path / "sw_point0.csv").exists()
    assert not (tmp_path / "sw_point1.csv").exists()
    assert (tmp_path / "sw_point2.csv").exists()
    on_disk = read_csv(tmp_path / "sw_sweep.csv")
    assert len(on_disk) == 3
    assert read_header(tmp_path / "sw_point2.csv")["sweep_value"] == "1.0"


def test_axis_columns_follow_pairing(paired_params, baseline_params):
    assert axis_columns(paired_params, "couplings[1]", 0.5) == {"coupling_2": 0.5, "coupling_4": 0.5}
    assert axis_columns(baseline_params, "detunings[0]", 9.0) == {"detuning_1": 9.0}
    assert axis_columns(baseline_params, "cutoff", 8.0) == {"n_max": 8}
    assert axis_columns(baseline_params, "kappa", -1.0) == {"kappa": -1.0}


def test_sweep_pool_keeps_order(tmp_path):
    cfg = make_config(
        experiment="sweep",
        name="pool",
        run={"steady_state": False, "t_final": 0.5},
        sweep={"axis": "g", "values": [2.0, 0.5, 1.0]},
    )
    serial = run_sweep(cfg, tmp_path / "serial", workers=1)
    pooled = run_sweep(cfg, tmp_path / "pooled", workers=2)
    pd.testing.assert_frame_equal(serial, pooled)


def test_fast_validation_checks(tmp_path):
    names = ["eigen_numeric", "selection_rules", "hamiltonians", "uniform_commutation",
             "swap_symmetry", "uniform_null_result"]
    cfg = make_config(experiment="validate", validate={"checks": names})
    report = run_validate(cfg, out_dir=tmp_path)
    assert [r[0] for r in report.results] == names
    assert report.passed, report.results
    assert (tmp_path / "validate_report.csv").exists()


def test_unknown_check_is_config_error():
    from flujo.core.errors import ConfigError

    cfg = make_config(experiment="validate", validate={"checks": ["nope"]})
    with pytest.raises(ConfigError):
        run_validate(cfg)
    assert "record_integrity" in CHECKS


@pytest.mark.slow
def test_baseline_energy_transfer_reaches_steady_state():
    cfg = make_config(run={"steady_state": True})
    s = compute_energy_transfer(cfg).summary
    assert s["converged"]
    assert s["residual"] < 1e-9
    assert s["steady_value"] >= 0.99
    assert abs(s["steady_value"] - s["predicted_transfer"]) <= 0.005
    assert s["excitation_drift"] < 1e-7


@pytest.mark.slow
def test_full_validation_and_negative_control(tmp_path):
    cfg = make_config(experiment="validate")
    assert run_validate(cfg, out_dir=tmp_path).passed
    faulty = make_config(experiment="validate", validate={"checks": ["record_integrity"], "inject_fault": True})
    report = run_validate(faulty, out_dir=tmp_path)
    assert not report.passed


def _steady_state_transfer(n_max=6, **initial_state):
    cfg = make_state_config(run={"steady_state": True}, initial_state=initial_state)
    return compute_state_transfer(cfg.with_model(cfg.model.with_axis("cutoff", n_max))).summary


@pytest.fixture(scope="module")
def bell_steady():
    return _steady_state_transfer()


@pytest.mark.slow
def test_state_transfer_reaches_high_fidelity(bell_steady):
    assert bell_steady["converged"]
    assert bell_steady["steady_value"] < 0.01
    assert bell_steady["excitation_drift"] < 1e-7
    # el par lógico conserva la coherencia al pasar de (1,3) a (2,4)
    assert bell_steady["coherence_sum_initial"] > 0.49
    assert bell_steady["coherence_sum_final"] > 0.49


@pytest.mark.slow
@pytest.mark.parametrize("alpha, beta", [
    (1.0, 0.0),
    (0.0, 1.0),
    (1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)),
    (math.sqrt(0.3), math.sqrt(0.7)),
])
def test_arbitrary_states_transfer_like_bell(bell_steady, alpha, beta):
    other = _steady_state_transfer(alpha=alpha, beta=beta)
    assert other["converged"]
    assert abs(other["fidelity"] - bell_steady["fidelity"]) <= 0.005


@pytest.mark.slow
def test_state_transfer_is_converged_in_cutoff(bell_steady):
    wider = _steady_state_transfer(n_max=8)
    assert abs(wider["steady_value"] - bell_steady["steady_value"]) < 1e-6


@pytest.mark.slow
def test_baseline_steady_state_with_default_integrator():
    cfg = make_config(integrator={"record_stride": 0.25}, run={"steady_state": True})
    assert cfg.integrator.method == "auto"
    s = compute_energy_transfer(cfg).summary
    assert s["converged"]
    assert s["residual"] < 1e-9
    assert s["steady_value"] >= 0.99


@pytest.mark.slow
def test_infidelity_falls_with_g(tmp_path):
    from flujo.experiments.config import ConfigLoader

    cfg = ConfigLoader().load("bell_transfer")
    table = run_sweep(cfg, tmp_path)
    assert (table["error"] == "").all()
    # valores de g: 0.25, 0.5, 1, 2
    infidelity = table["steady_value"].to_numpy()
    assert np.all(np.diff(infidelity) > 0.0)
    assert infidelity[0] < 0.01


@pytest.mark.slow
def test_g_sweep_follows_dressed_prediction(tmp_path):
    from flujo.core.analysis import analytic_eigensystem
    from flujo.experiments.config import ConfigLoader

    cfg = ConfigLoader().load("coupling_strength")
    table = run_sweep(cfg, tmp_path)
    assert (table["error"] == "").all()
    values = table["steady_value"].to_numpy()
    assert np.all(np.diff(values) < 0.0)
    for g, value in zip(table["sweep_value"], values):
        predicted = analytic_eigensystem(cfg.model.with_axis("g", g)).predicted_transfer
        assert abs(value - predicted) <= 0.005


@pytest.mark.slow
def test_omega_c_sweep_is_fastest_on_resonance(tmp_path):
    from flujo.experiments.config import ConfigLoader

    cfg = ConfigLoader().load("cavity_detuning")
    table = run_sweep(cfg, tmp_path)
    # valores: 13, 14, 15, 15.132747, 16, 17; 15.132747 es la separación vestida
    t_half = table["t_half"].to_numpy()
    assert int(np.argmin(t_half)) == 3
    assert t_half[0] > t_half[1] > t_half[2] > t_half[3]
    assert t_half[5] > t_half[4] > t_half[3]
