"""Config loading, validation, and environment overrides."""

from __future__ import annotations

import pytest

from trajshaper.config import ENV_ENDPOINT, ENV_TOKEN, Config, load_config
from trajshaper.errors import ConfigError


def test_defaults_without_file():
    config = load_config(env={})
    assert config.optimizer.k == 1.0
    assert config.observer.tau_distance == 0.05
    assert config.interpreter.mode == "template"
    assert config.max_rounds == 4
    assert config.resample_n == 64


def test_file_overrides(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "optimizer:\n  eta: 0.02\n  max_iterations: 50\n"
        "observer:\n  tau_speed: 0.2\n"
        "interpreter:\n  mode: external\n  endpoint: http://x/v1\n"
        "max_rounds: 2\nresample_n: 32\n"
    )
    config = load_config(path, env={})
    assert config.optimizer.eta == 0.02
    assert config.optimizer.max_iterations == 50
    assert config.optimizer.k == 1.0  # untouched default
    assert config.observer.tau_speed == 0.2
    assert config.interpreter.mode == "external"
    assert config.max_rounds == 2 and config.resample_n == 32


def test_unknown_top_level_key(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("optimiser:\n  eta: 0.02\n")
    with pytest.raises(ConfigError, match="optimiser"):
        load_config(path, env={})


def test_unknown_nested_key(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("optimizer:\n  learning_rate: 0.02\n")
    with pytest.raises(ConfigError, match="learning_rate"):
        load_config(path, env={})


def test_invalid_value(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("optimizer:\n  eta: -1\n")
    with pytest.raises(ConfigError):
        load_config(path, env={})


def test_env_overrides_endpoint_and_token(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("interpreter:\n  mode: external\n  endpoint: http://file/v1\n  token: filetok\n")
    env = {ENV_ENDPOINT: "http://env/v1", ENV_TOKEN: "envtok"}
    config = load_config(path, env=env)
    assert config.interpreter.endpoint == "http://env/v1"
    assert config.interpreter.token == "envtok"


def test_external_without_endpoint_fails_on_use():
    config = Config()
    config.interpreter.mode = "external"
    with pytest.raises(ConfigError, match="endpoint"):
        config.interpreter.client_config()
