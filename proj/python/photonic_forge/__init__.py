"""Python bindings for the photonic-forge gate designer.

Functions that run simulations take a config in the same flat dotted-key
form the CLI reads, either as a dict or as a path to a JSON file.
"""

import json
import os

from . import _core
from ._core import (
    ConfigError,
    DivergenceError,
    Error,
    FieldRecord,
    ParseError,
    PixelMap,
    ShapeError,
    ZeroNormError,
    fidelity,
    flip,
    fourier,
    gate,
    hadamard,
    identity_gate,
    inner_product,
    load_geometry,
    refine,
    sample_u2,
    save_geometry,
    unitarity_defect,
)

__all__ = [
    "ConfigError",
    "DivergenceError",
    "Error",
    "FieldRecord",
    "ParseError",
    "PixelMap",
    "ShapeError",
    "ZeroNormError",
    "evaluate",
    "fidelity",
    "flip",
    "fourier",
    "gate",
    "hadamard",
    "identity_gate",
    "inner_product",
    "load_geometry",
    "make_targets",
    "optimize",
    "refine",
    "resolve_config",
    "sample_u2",
    "save_geometry",
    "sweep_displacement",
    "sweep_wavelength",
    "unitarity_defect",
]


def _config_text(config):
    if isinstance(config, (str, os.PathLike)):
        with open(config, encoding="utf-8") as f:
            return f.read()
    return json.dumps(config)


def resolve_config(config):
    """Every key with its resolved value, defaults filled in."""
    return json.loads(_core.resolve_config(_config_text(config)))


def make_targets(config):
    """Reference output records, one per basis input."""
    return _core.make_targets(_config_text(config))


def evaluate(config, pixel_map):
    """dict with per_input, aggregate and minimum fidelity."""
    return _core.evaluate(_config_text(config), pixel_map)


def sweep_wavelength(config, pixel_map, wavelengths_nm):
    return _core.sweep_wavelength(_config_text(config), pixel_map, list(wavelengths_nm))


def sweep_displacement(config, pixel_map, shifts_nm, trials=10, seed=1):
    return _core.sweep_displacement(_config_text(config), pixel_map, list(shifts_nm), trials, seed)


def optimize(config):
    """(best PixelMap, fidelity, iteration log as a list of dicts)."""
    return _core.optimize(_config_text(config))
