"""Scenario configuration: a single strict JSON object.

Schema (all sections optional except command):

    {
      "command":    "doi" | "dk" | "flow" | "weightfn" | "verify",
      "model":      {"name": "two_level" | "random_gapped" | "tfim", "params": {...}},
      "gamma":      positive number (weightfn scale; overrides the model's),
      "s_grid":     {"start": a, "end": b, "steps": n},
      "weight_fn":  {"fourier_nodes": n, "t_max_factor": x},
      "quadrature": {"t_nodes": n, "u_nodes": n, "contour_nodes": n},
      "seed":       unsigned 64-bit integer,
      "output":     file path
    }

Unknown keys anywhere are rejected.  The environment variable DOIFLOW_SEED
overrides the seed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import ConfigError

COMMANDS = ("doi", "dk", "flow", "weightfn", "verify")
MODEL_NAMES = ("two_level", "random_gapped", "tfim")

MODEL_DEFAULT_SGRID = {
    "two_level": (0.0, 1.0),
    "random_gapped": (0.0, 1.0),
    "tfim": (1.2, 2.0),
}


@dataclass(frozen=True)
class ScenarioConfig:
    command: str
    model_name: str = "two_level"
    model_params: dict = field(default_factory=dict)
    gamma: float | None = None
    s_start: float = 0.0
    s_end: float = 1.0
    steps: int = 1000
    fourier_nodes: int = 200
    t_max_factor: float = 400.0
    t_nodes: int = 400
    u_nodes: int = 64
    contour_nodes: int = 64
    seed: int = 1
    output: str | None = None

    def echo(self) -> dict:
        """The effective configuration, embedded in every report."""
        return {
            "command": self.command,
            "model": {"name": self.model_name, "params": dict(self.model_params)},
            "gamma": self.gamma,
            "s_grid": {"start": self.s_start, "end": self.s_end, "steps": self.steps},
            "weight_fn": {"fourier_nodes": self.fourier_nodes,
                          "t_max_factor": self.t_max_factor},
            "quadrature": {"t_nodes": self.t_nodes, "u_nodes": self.u_nodes,
                           "contour_nodes": self.contour_nodes},
            "seed": self.seed,
        }


def _require_keys(obj: dict, allowed, where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def _number(obj, key, where, default=None, minimum=None, integer=False):
    if key not in obj:
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    if integer:
        if int(val) != val:
            raise ConfigError(f"{where}.{key} must be an integer")
        val = int(val)
    if minimum is not None and val < minimum:
        raise ConfigError(f"{where}.{key} must be >= {minimum}")
    return val


def parse_config(text: str) -> ScenarioConfig:
    """Strict parse of a scenario configuration from JSON text."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON (line {exc.lineno}): {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(raw, {"command", "model", "gamma", "s_grid", "weight_fn",
                        "quadrature", "seed", "output"}, "config")

    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r} (command)")

    model = raw.get("model", {})
    if not isinstance(model, dict):
        raise ConfigError("model must be an object")
    _require_keys(model, {"name", "params"}, "model")
    model_name = model.get("name", "two_level")
    if model_name not in MODEL_NAMES:
        raise ConfigError(f"unknown model name {model_name!r} (model.name)")
    model_params = model.get("params", {})
    if not isinstance(model_params, dict):
        raise ConfigError("model.params must be an object")

    gamma = _number(raw, "gamma", "config", default=None)
    if gamma is not None and gamma <= 0:
        raise ConfigError("gamma must be positive (gamma)")

    default_lo, default_hi = MODEL_DEFAULT_SGRID[model_name]
    s_grid = raw.get("s_grid", {})
    if not isinstance(s_grid, dict):
        raise ConfigError("s_grid must be an object")
    _require_keys(s_grid, {"start", "end", "steps"}, "s_grid")
    s_start = float(_number(s_grid, "start", "s_grid", default=default_lo))
    s_end = float(_number(s_grid, "end", "s_grid", default=default_hi))
    steps = _number(s_grid, "steps", "s_grid", default=1000, minimum=1, integer=True)
    if not s_start < s_end:
        raise ConfigError("s_grid.start must be < s_grid.end (steps)")

    wf = raw.get("weight_fn", {})
    if not isinstance(wf, dict):
        raise ConfigError("weight_fn must be an object")
    _require_keys(wf, {"fourier_nodes", "t_max_factor"}, "weight_fn")
    fourier_nodes = _number(wf, "fourier_nodes", "weight_fn", default=200,
                            minimum=2, integer=True)
    t_max_factor = float(_number(wf, "t_max_factor", "weight_fn",
                                 default=400.0, minimum=1.0))

    quad = raw.get("quadrature", {})
    if not isinstance(quad, dict):
        raise ConfigError("quadrature must be an object")
    _require_keys(quad, {"t_nodes", "u_nodes", "contour_nodes"}, "quadrature")
    t_nodes = _number(quad, "t_nodes", "quadrature", default=400, minimum=2, integer=True)
    u_nodes = _number(quad, "u_nodes", "quadrature", default=64, minimum=2, integer=True)
    contour_nodes = _number(quad, "contour_nodes", "quadrature", default=64,
                            minimum=2, integer=True)

    seed = _number(raw, "seed", "config", default=1, minimum=0, integer=True)
    if seed >= 2 ** 64:
        raise ConfigError("seed must fit in 64 bits (seed)")
    env_seed = os.environ.get("DOIFLOW_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"DOIFLOW_SEED is not an integer: {env_seed!r}") from exc

    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a string path (output)")

    return ScenarioConfig(
        command=command, model_name=model_name, model_params=dict(model_params),
        gamma=gamma, s_start=s_start, s_end=s_end, steps=steps,
        fourier_nodes=fourier_nodes, t_max_factor=t_max_factor,
        t_nodes=t_nodes, u_nodes=u_nodes, contour_nodes=contour_nodes,
        seed=int(seed), output=output,
    )


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    return parse_config(text)
