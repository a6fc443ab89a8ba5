"""YAML configuration with strict validation and environment overrides.

Unknown keys anywhere in the document are rejected. TRAJSHAPER_LLM_ENDPOINT
and TRAJSHAPER_LLM_TOKEN override the interpreter endpoint and token, so
credentials can stay out of config files.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .agents import ObserverThresholds
from .errors import ConfigError
from .llm import ClientConfig
from .optimizer import DEFAULT_INFLUENCE_FACTOR, DEFAULT_MIN_INFLUENCE, OptimizerParams

ENV_ENDPOINT = "TRAJSHAPER_LLM_ENDPOINT"
ENV_TOKEN = "TRAJSHAPER_LLM_TOKEN"


@dataclass
class InterpreterConfig:
    mode: str = "template"  # template | external
    endpoint: str = ""
    model: str = "deepseek-chat"
    token: str = ""
    timeout: float = 30.0

    def client_config(self) -> ClientConfig:
        if not self.endpoint:
            raise ConfigError("external interpreter selected but no endpoint configured")
        return ClientConfig(self.endpoint, self.model, self.token, self.timeout)


@dataclass
class InfluenceConfig:
    min_radius: float = DEFAULT_MIN_INFLUENCE
    dimension_factor: float = DEFAULT_INFLUENCE_FACTOR


@dataclass
class Config:
    optimizer: OptimizerParams = field(default_factory=OptimizerParams)
    observer: ObserverThresholds = field(default_factory=ObserverThresholds)
    interpreter: InterpreterConfig = field(default_factory=InterpreterConfig)
    influence: InfluenceConfig = field(default_factory=InfluenceConfig)
    max_rounds: int = 4
    resample_n: int = 64


def _build(cls, doc: dict, path: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: must be a mapping")
    names = {f.name for f in dataclasses.fields(cls)}
    for key in doc:
        if key not in names:
            raise ConfigError(f"{path}.{key}: unknown key")
    try:
        return cls(**doc)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{path}: {e}") from e


def load_config(path: str | Path | None = None, env: dict | None = None) -> Config:
    """Load and validate a config file; absent path means all defaults."""
    env = os.environ if env is None else env
    doc = {}
    if path is not None:
        raw = Path(path).read_text()
        doc = yaml.safe_load(raw) or {}
        if not isinstance(doc, dict):
            raise ConfigError("$: top level must be a mapping")

    sections = {
        "optimizer": OptimizerParams,
        "observer": ObserverThresholds,
        "interpreter": InterpreterConfig,
        "influence": InfluenceConfig,
    }
    kwargs = {}
    for key, value in doc.items():
        if key in sections:
            kwargs[key] = _build(sections[key], value, f"$.{key}")
        elif key == "max_rounds":
            if not isinstance(value, int) or value < 1:
                raise ConfigError("$.max_rounds: must be a positive integer")
            kwargs[key] = value
        elif key == "resample_n":
            if not isinstance(value, int) or value < 4:
                raise ConfigError("$.resample_n: must be an integer >= 4")
            kwargs[key] = value
        else:
            raise ConfigError(f"$.{key}: unknown key")
    config = Config(**kwargs)

    if env.get(ENV_ENDPOINT):
        config.interpreter.endpoint = env[ENV_ENDPOINT]
    if env.get(ENV_TOKEN):
        config.interpreter.token = env[ENV_TOKEN]
    if config.interpreter.mode not in ("template", "external"):
        raise ConfigError("$.interpreter.mode: must be 'template' or 'external'")
    return config
