"""Kernel backend selection.

The hot kernels exist twice: compiled (numba, ``_kernels_numba``) and
interpreted (numpy, ``_kernels_numpy``) with identical signatures.  The env
flag ``STEPSTONE_NUMBA`` picks the path:

* unset / "auto"  - use numba when importable, else fall back to numpy
* "0", "false", "off", "no" - force the numpy path
* "1", "true", "on", "yes"  - require numba; raise if it cannot be imported
"""

from __future__ import annotations

import os
from types import ModuleType

ENV_FLAG = "STEPSTONE_NUMBA"

_cached: ModuleType | None = None


def requested() -> bool | None:
    raw = os.environ.get(ENV_FLAG, "").strip().lower()
    if raw in ("0", "false", "off", "no"):
        return False
    if raw in ("1", "true", "on", "yes"):
        return True
    return None


def load_kernels(force: str | None = None) -> ModuleType:
    """Return the kernel module for `force` ("numba"/"numpy") or the env choice."""
    if force == "numpy":
        from . import _kernels_numpy

        return _kernels_numpy
    if force == "numba":
        from . import _kernels_numba

        return _kernels_numba
    if force is not None:
        raise ValueError(f"unknown backend {force!r}")

    req = requested()
    if req is False:
        from . import _kernels_numpy

        return _kernels_numpy
    try:
        from . import _kernels_numba

        return _kernels_numba
    except ImportError:
        if req is True:
            raise RuntimeError(
                f"{ENV_FLAG}=1 requires numba, which failed to import"
            ) from None
        from . import _kernels_numpy

        return _kernels_numpy


def get_kernels() -> ModuleType:
    """Process-wide kernel module, resolved once from the environment."""
    global _cached
    if _cached is None:
        _cached = load_kernels()
    return _cached


def active_backend() -> str:
    return get_kernels().BACKEND_NAME
