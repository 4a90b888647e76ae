"""Kernel backend selection.

The hot per-iteration sweeps exist twice: a numba @njit build and a pure
numpy build.  Set IPVB_BACKEND=numpy or IPVB_BACKEND=numba to force one;
by default the numba build is used when numba imports, numpy otherwise.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_BACKENDS = {"numpy": _kernels_numpy}
_numba_import_error: Exception | None = None
try:
    from . import _kernels_numba
    _BACKENDS["numba"] = _kernels_numba
except ImportError as exc:  # pragma: no cover - depends on the environment
    _numba_import_error = exc


def _initial_name() -> str:
    name = os.environ.get("IPVB_BACKEND", "").strip().lower()
    if name:
        if name not in ("numpy", "numba"):
            raise ValueError(
                f"IPVB_BACKEND must be 'numpy' or 'numba', got {name!r}"
            )
        if name not in _BACKENDS:
            raise ImportError(
                f"IPVB_BACKEND={name} but numba is unavailable: {_numba_import_error}"
            )
        return name
    return "numba" if "numba" in _BACKENDS else "numpy"


_active = _initial_name()


def backend_name() -> str:
    """Name of the active kernel backend."""
    return _active


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> None:
    """Force a kernel backend; mainly for tests and benchmarks."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown or unavailable backend {name!r}; have {available_backends()}"
        )
    _active = name


def get_backend():
    """The module implementing the decoder kernels."""
    return _BACKENDS[_active]
