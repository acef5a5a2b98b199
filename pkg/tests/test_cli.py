import yaml
from typer.testing import CliRunner

from flujo import __version__
from flujo.cli.app import EXIT_CONFIG, EXIT_OK, app

from conftest import make_config

runner = CliRunner()


def _write(tmp_path, cfg, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(cfg.resolved()))
    return str(path)


def test_version():
    result = runner.invoke(app, ["version"])
    assert result.exit_code == EXIT_OK
    assert __version__ in result.stdout


def test_print_config_exits_without_running(tmp_path):
    path = _write(tmp_path, make_config())
    result = runner.invoke(app, ["energy", "--config", path, "--print-config", "--out", str(tmp_path / "out")])
    assert result.exit_code == EXIT_OK
    assert "experiment: energy-transfer" in result.stdout
    assert not (tmp_path / "out").exists()


def test_energy_command_writes_results(tmp_path):
    path = _write(tmp_path, make_config())
    result = runner.invoke(app, ["energy", "-c", path, "-o", str(tmp_path / "out")])
    assert result.exit_code == EXIT_OK, result.output
    assert (tmp_path / "out" / "test.csv").exists()
    assert (tmp_path / "out" / "test_summary.csv").exists()


def test_single_run_presets_load_for_their_commands():
    for command, preset, experiment in (("energy", "energy_transfer", "energy-transfer"),
                                        ("state", "state_transfer", "state-transfer")):
        result = runner.invoke(app, [command, "--config", preset, "--print-config"])
        assert result.exit_code == EXIT_OK, result.output
        assert f"experiment: {experiment}" in result.stdout


def test_missing_config_is_config_error():
    result = runner.invoke(app, ["energy", "--config", "no-such-config"])
    assert result.exit_code == EXIT_CONFIG


def test_experiment_mismatch_is_config_error():
    result = runner.invoke(app, ["energy", "--config", "bell_transfer"])
    assert result.exit_code == EXIT_CONFIG


def test_eigen_command(tmp_path):
    path = _write(tmp_path, make_config(experiment="eigen-report", name="eig"))
    result = runner.invoke(app, ["eigen", "-c", path, "-o", str(tmp_path)])
    assert result.exit_code == EXIT_OK, result.output
    assert (tmp_path / "eig_selection.csv").exists()


def test_sweep_command(tmp_path):
    cfg = make_config(
        experiment="sweep",
        name="sw",
        run={"steady_state": False, "t_final": 0.5},
        sweep={"axis": "omega_c", "values": [14.0, 16.0]},
    )
    result = runner.invoke(app, ["sweep", "-c", _write(tmp_path, cfg), "-o", str(tmp_path), "-w", "1"])
    assert result.exit_code == EXIT_OK, result.output
    assert (tmp_path / "sw_sweep.csv").exists()


def test_validate_command_subset(tmp_path):
    cfg = make_config(experiment="validate", validate={"checks": ["selection_rules", "hamiltonians"]})
    result = runner.invoke(app, ["validate", "-c", _write(tmp_path, cfg), "-o", str(tmp_path)])
    assert result.exit_code == EXIT_OK, result.output
    report = (tmp_path / "validate_report.csv").read_text()
    assert "selection_rules" in report
    assert "hamiltonians" in report
