"""Backend selection for the orbit hot kernels.

The compiled extension (rotorb._kernels, built from _kernels.pyx) is
preferred; the numpy fallback (rotorb._kernels_py) loads when the extension
is missing.  Set ROTORB_BACKEND=python or ROTORB_BACKEND=compiled to force a
choice; forcing the compiled backend raises if it was never built.

Both backends export the same names:
    expand_stationary, expand_peripatetic_2d, expand_peripatetic_3d,
    Dedup, GridIndex, BACKEND_NAME
"""

from __future__ import annotations

import importlib
import os

_CHOICES = ("compiled", "python")


def load(name: str):
    """Import one backend by name (used by tests and benchmarks)."""
    if name == "python":
        return importlib.import_module("rotorb._kernels_py")
    if name == "compiled":
        return importlib.import_module("rotorb._kernels")
    raise ValueError(f"unknown backend {name!r}; choose from {_CHOICES}")


def _select():
    forced = os.environ.get("ROTORB_BACKEND")
    if forced:
        if forced not in _CHOICES:
            raise ImportError(
                f"ROTORB_BACKEND={forced!r} is not one of {_CHOICES}")
        return load(forced)
    try:
        return load("compiled")
    except ImportError:
        return load("python")


_impl = _select()

BACKEND_NAME = _impl.BACKEND_NAME
expand_stationary = _impl.expand_stationary
expand_peripatetic_2d = _impl.expand_peripatetic_2d
expand_peripatetic_3d = _impl.expand_peripatetic_3d
Dedup = _impl.Dedup
GridIndex = _impl.GridIndex


def get_backend() -> str:
    """Name of the backend in use: 'compiled' or 'python'."""
    return BACKEND_NAME
