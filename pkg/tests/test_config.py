"""Strict scenario-config parsing."""

import pytest

from doiflow.config import parse_config
from doiflow.errors import ConfigError


def test_minimal_flow_config_defaults():
    cfg = parse_config('{"command": "flow", "model": {"name": "two_level"}}')
    assert cfg.steps == 1000
    assert cfg.contour_nodes == 64
    assert cfg.fourier_nodes == 200
    assert cfg.u_nodes == 64
    assert cfg.seed == 1
    assert (cfg.s_start, cfg.s_end) == (0.0, 1.0)


def test_tfim_default_domain():
    cfg = parse_config('{"command": "flow", "model": {"name": "tfim"}}')
    assert (cfg.s_start, cfg.s_end) == (1.2, 2.0)


def test_zero_steps_rejected():
    with pytest.raises(ConfigError, match="steps"):
        parse_config('{"command": "flow", "s_grid": {"steps": 0}}')


def test_unknown_model_rejected():
    with pytest.raises(ConfigError, match="model.name"):
        parse_config('{"command": "flow", "model": {"name": "bogus"}}')


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="mystery"):
        parse_config('{"command": "flow", "mystery": 1}')
    with pytest.raises(ConfigError, match="extra"):
        parse_config('{"command": "flow", "s_grid": {"extra": 1}}')


def test_bad_json_reports_line():
    with pytest.raises(ConfigError, match="line"):
        parse_config('{"command": "flow",,}')


def test_missing_command_rejected():
    with pytest.raises(ConfigError, match="command"):
        parse_config('{"model": {"name": "two_level"}}')


def test_inverted_grid_rejected():
    with pytest.raises(ConfigError):
        parse_config('{"command": "dk", "s_grid": {"start": 1.0, "end": 0.0}}')


def test_gamma_must_be_positive():
    with pytest.raises(ConfigError, match="gamma"):
        parse_config('{"command": "weightfn", "gamma": -2.0}')


def test_node_counts_floor():
    with pytest.raises(ConfigError):
        parse_config('{"command": "flow", "quadrature": {"contour_nodes": 1}}')


def test_seed_env_override(monkeypatch):
    monkeypatch.setenv("DOIFLOW_SEED", "777")
    cfg = parse_config('{"command": "verify", "seed": 3}')
    assert cfg.seed == 777
    monkeypatch.setenv("DOIFLOW_SEED", "not-an-int")
    with pytest.raises(ConfigError, match="DOIFLOW_SEED"):
        parse_config('{"command": "verify"}')


def test_echo_round_trip():
    cfg = parse_config('{"command": "doi", "gamma": 1.5, "seed": 9}')
    echo = cfg.echo()
    assert echo["command"] == "doi"
    assert echo["gamma"] == 1.5
    assert echo["seed"] == 9
