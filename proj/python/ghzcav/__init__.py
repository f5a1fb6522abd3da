"""GHZ-state preparation in a cavity: calibration, simulation, sweeps and noise.

Configs may be given as a dict, a JSON string or a path to a JSON file.
Reports come back as dicts; trace and sweep tables as CSV text.
"""

import json
import os

from ._core import (
    ConfigError,
    Error,
    InfeasibleError,
    NumericalError,
    __version__,
    closed_form_step_map,
    fidelity_analytic,
    occupation_probability,
    splitmix64,
)
from . import _core

__all__ = [
    "ConfigError",
    "Error",
    "InfeasibleError",
    "NumericalError",
    "calibrate",
    "closed_form_step_map",
    "fidelity_analytic",
    "load_config",
    "noise",
    "occupation_probability",
    "simulate",
    "splitmix64",
    "sweep",
]


def _text(config):
    if isinstance(config, dict):
        return json.dumps(config), "config"
    if isinstance(config, os.PathLike) or (isinstance(config, str) and not config.lstrip().startswith("{")):
        path = os.fspath(config)
        with open(path, encoding="utf-8") as f:
            return f.read(), path
    return config, "config"


def load_config(config):
    """Config with every default filled in."""
    return json.loads(_core.normalized_config(*_text(config)))


def calibrate(config, mode=None, seed=None):
    return json.loads(_core.calibrate(*_text(config), mode, seed))


def simulate(config, mode=None, seed=None):
    """Returns (report, trace_csv)."""
    report, trace = _core.simulate(*_text(config), mode, seed)
    return json.loads(report), trace


def sweep(config, mode=None, seed=None):
    """Returns (report, sweep_csv)."""
    report, table = _core.sweep(*_text(config), mode, seed)
    return json.loads(report), table


def noise(config, mode=None, seed=None):
    """Returns the report; report["target_met"] says whether the stderr target held."""
    report, met = _core.noise(*_text(config), mode, seed)
    out = json.loads(report)
    out["target_met"] = met
    return out
