"""Kernel backend selection.

The compiled core is preferred when the extension built; the pure-NumPy
twin is always available.  ``SWIPTBEAM_KERNELS=pure|cython`` forces a
choice at import time, and callers may pass an explicit backend to the
solver (used by the equivalence tests and the backend benchmark).
"""

from __future__ import annotations

import os

from . import pure

_BACKENDS = {"pure": pure}

try:
    from . import _core  # compiled extension, optional

    _BACKENDS["cython"] = _core
except ImportError:  # pragma: no cover - depends on the build environment
    _core = None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str | None = None):
    if name is None:
        return default_backend()
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown kernel backend {name!r}; available: {available_backends()}")


def default_backend():
    forced = os.environ.get("SWIPTBEAM_KERNELS")
    if forced:
        return get_backend(forced)
    return _BACKENDS.get("cython", pure)
