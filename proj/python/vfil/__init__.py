"""Unit-speed vortex filament on a wall: compatibility checks, reflection,
evolution and diagnostics. Arrays are numpy arrays of shape (n, 3)."""

import json

from . import _core
from ._core import ORACLE_TOLERANCE, ORDER_BAND, VfilError, extend, family_data, jump_residual

__all__ = [
    "ORACLE_TOLERANCE",
    "ORDER_BAND",
    "VfilError",
    "check",
    "convergence",
    "extend",
    "family_data",
    "jump_residual",
    "oracle",
    "simulate",
]


def check(v, length, order=1, tol=1e-6):
    """Compatibility report for half-line samples v on [0, length]."""
    return json.loads(_core.check_json(v, length, order, tol))


def simulate(config, reconstruct=False):
    """Runs a simulation from a config mapping or key = value text.

    Returns a dict with the parsed summary, the node coordinates, the snapshot
    times and arrays, and the reconstructed curves when requested."""
    if isinstance(config, str):
        pairs = {}
        for line in config.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                key, sep, value = line.partition("=")
                if not sep:
                    raise ValueError(f"expected key = value, got {line!r}")
                pairs[key.strip()] = value.strip()
        config = pairs
    out = _core.simulate({str(k): str(v) for k, v in config.items()}, reconstruct)
    out["summary"] = json.loads(out.pop("summary_json"))
    return out


def oracle(name, n=256, t_final=0.5, params=None, scheme="rk4_project"):
    return json.loads(_core.oracle_json(name, n, t_final, dict(params or {}), scheme))


def convergence(name, levels, t_final=0.5, params=None, scheme="rk4_project"):
    return json.loads(_core.convergence_json(name, list(levels), t_final, dict(params or {}), scheme))
