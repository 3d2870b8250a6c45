"""Backend selection for the least-squares kernels.

The compiled extension is used when it imports; setting
``GRASSCURV_PURE_PYTHON=1`` forces the pure-Python implementation.
"""
from __future__ import annotations

import os

from . import _lmcore_py

if os.environ.get("GRASSCURV_PURE_PYTHON", "") not in ("", "0"):
    _impl = _lmcore_py
    BACKEND = "python"
else:
    try:
        from . import _lmcore as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _lmcore_py
        BACKEND = "python"

residuals = _impl.residuals
multistart = _impl.multistart
jacobian = _impl.jacobian


def get_backend(name: str | None = None):
    """The kernel module for ``name`` ("cython" or "python"); the active one when ``None``."""
    if name is None:
        return _impl
    if name == "python":
        return _lmcore_py
    if name == "cython":
        from . import _lmcore
        return _lmcore
    raise ValueError(f"unknown backend {name!r}")
