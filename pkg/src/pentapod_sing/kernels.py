"""Backend selection for the batched KKT Newton kernel.

The compiled extension is used when it was built, unless the environment
variable ``PENTAPOD_PURE_PYTHON`` is set to a true value.
"""
from __future__ import annotations

import importlib
import os

from . import _kernels_py

CONVERGED = _kernels_py.CONVERGED
MAXITER = _kernels_py.MAXITER
DIVERGED = _kernels_py.DIVERGED
SINGULAR = _kernels_py.SINGULAR


def _load_compiled():
    try:
        return importlib.import_module("pentapod_sing._kernels")
    except ImportError:
        return None


_compiled = _load_compiled()


def available_backends() -> list:
    return (["cython"] if _compiled is not None else []) + ["python"]


def get_backend(name: str | None = None):
    """Kernel module by name (``"cython"`` or ``"python"``); default honours the env var."""
    if name is None:
        forced = os.environ.get("PENTAPOD_PURE_PYTHON", "").strip().lower() in ("1", "true", "yes")
        name = "python" if forced or _compiled is None else "cython"
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel extension is not built")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def backend_name() -> str:
    return "python" if get_backend() is _kernels_py else "cython"


def kkt_newton_batch(*args, backend: str | None = None, **kwargs):
    return get_backend(backend).kkt_newton_batch(*args, **kwargs)
