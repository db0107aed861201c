"""Shortcut-to-adiabaticity strokes for trapped Fermi gases."""

import json

from . import _sta_core
from ._sta_core import NumericalError, ValidationError, gaussian_fit, synthesize_profile

__all__ = [
    "NumericalError",
    "ValidationError",
    "design_scenario",
    "gaussian_fit",
    "preset",
    "preset_names",
    "resolve",
    "run_scenario",
    "synthesize_profile",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def preset_names():
    return list(_sta_core.preset_names())


def preset(name):
    return json.loads(_sta_core.preset_config(name))


def resolve(config, base_dir=""):
    """Fully resolved configuration (explicit gas closures, Hz and s)."""
    return json.loads(_sta_core.resolve(_text(config), str(base_dir)))


def run_scenario(config, output_dir="", base_dir=""):
    """Runs one scenario, writes its artifacts and returns arrays plus the parsed summary."""
    out = _sta_core.run_scenario(_text(config), str(output_dir), str(base_dir))
    out["summary"] = json.loads(out["summary"])
    return out


def design_scenario(config, output_dir="", base_dir=""):
    return json.loads(_sta_core.design_scenario(_text(config), str(output_dir), str(base_dir)))
