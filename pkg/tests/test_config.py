import pytest
import yaml

from flujo.core.errors import ConfigError
from flujo.experiments.config import ConfigLoader, ExperimentConfig, dump_config

from conftest import make_config, make_state_config

PRESETS = ["coupling_ratio", "cavity_detuning", "coupling_strength", "bell_transfer", "validate",
           "energy_transfer", "state_transfer"]


def test_presets_are_listed_and_valid():
    loader = ConfigLoader()
    assert loader.list_presets() == sorted(PRESETS)
    for name in PRESETS:
        cfg = loader.load(name)
        assert cfg.name == name
        assert cfg.integrator.method == "propagator"


def test_bell_transfer_preset_is_paired_state_sweep():
    cfg = ConfigLoader().load("bell_transfer")
    assert cfg.experiment == "sweep"
    assert cfg.model.paired
    assert cfg.sweep.axis == "g"
    assert cfg.sweep.values == [0.25, 0.5, 1.0, 2.0]
    assert cfg.model.cutoff.n_max == 6
    alpha, beta = cfg.initial_state.amplitudes
    assert abs(alpha) ** 2 + abs(beta) ** 2 == pytest.approx(1.0)


def test_single_run_presets_match_their_commands():
    loader = ConfigLoader()
    energy = loader.load("energy_transfer")
    assert energy.experiment == "energy-transfer"
    assert energy.run.steady_state
    assert energy.model.detunings == [15.0, 0.0]
    assert energy.model.couplings == [2.0, 1.0]
    state = loader.load("state_transfer")
    assert state.experiment == "state-transfer"
    assert state.run.steady_state
    assert state.model.paired
    assert state.model.g == 0.25
    assert state.model.cutoff.n_max == 6


def test_resolved_config_round_trips():
    cfg = make_config()
    again = ExperimentConfig.model_validate(cfg.resolved())
    assert again == cfg
    assert again.config_hash() == cfg.config_hash()
    assert "validate" in cfg.resolved()
    assert yaml.safe_load(dump_config(cfg)) == cfg.resolved()


def test_hash_tracks_parameters():
    base = make_config()
    other = base.with_model(base.model.with_axis("g", 0.5))
    assert other.config_hash() != base.config_hash()
    assert len(base.config_hash()) == 16


def test_experiment_and_model_must_agree():
    with pytest.raises(ValueError):
        make_config(experiment="state-transfer")
    with pytest.raises(ValueError):
        make_state_config(experiment="energy-transfer")
    with pytest.raises(ValueError):
        make_config(experiment="sweep")
    with pytest.raises(ValueError):
        make_config(experiment="sweep", sweep={"axis": "temperature", "values": [1.0]})


def test_initial_state_rules():
    with pytest.raises(ValueError):
        make_config(initial_state={"labels": [0, 2]})
    with pytest.raises(ValueError):
        make_config(initial_state={"labels": [0, 1, 1]})
    with pytest.raises(ValueError):
        make_config(initial_state={"alpha": 1.0, "beta": 1.0})
    with pytest.raises(ValueError):
        make_config(initial_state={"alpha": 1.0})
    cfg = make_state_config(initial_state={"alpha": [0.0, 1.0], "beta": 0.0})
    assert cfg.initial_state.amplitudes == (1j, 0j)


def test_unknown_keys_are_rejected(tmp_path):
    path = tmp_path / "bad.yaml"
    data = make_config().resolved()
    data["modle"] = {}
    path.write_text(yaml.safe_dump(data))
    with pytest.raises(ConfigError):
        ConfigLoader().load(str(path))


def test_loader_errors(tmp_path):
    loader = ConfigLoader(presets=tmp_path)
    with pytest.raises(ConfigError):
        loader.load("does-not-exist")
    (tmp_path / "list.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        loader.load("list")
    (tmp_path / "broken.yaml").write_text("model: [1, 2\n")
    with pytest.raises(ConfigError):
        loader.load("broken.yaml")


def test_output_dir_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("FLUJO_OUTPUT_ROOT", str(tmp_path / "env"))
    cfg = make_config()
    assert cfg.output_dir() == (tmp_path / "env").resolve()
    assert cfg.output_dir(tmp_path / "cli") == tmp_path / "cli"
    cfg = make_config(output={"path": str(tmp_path / "yaml")})
    assert cfg.output_dir() == tmp_path / "yaml"
