"""Kernel backend selection.

The stepper's elementwise passes exist twice: a compiled Cython module
(kgspectral._core) and a pure-numpy fallback (kgspectral._kernels_py)
with identical signatures.  The compiled one is preferred when importable;
KGSPECTRAL_BACKEND=python|compiled forces the choice.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _core
except ImportError:
    _core = None

_ENV_VAR = "KGSPECTRAL_BACKEND"


def select_kernels(name: str | None = None):
    """Return the kernel module; name (or the env var) may force one."""
    choice = name if name is not None else os.environ.get(_ENV_VAR)
    if choice in (None, "", "auto"):
        return _core if _core is not None else _kernels_py
    if choice == "python":
        return _kernels_py
    if choice == "compiled":
        if _core is None:
            raise RuntimeError(
                "compiled backend requested via "
                f"{_ENV_VAR} but kgspectral._core is not importable"
            )
        return _core
    raise ValueError(f"unknown backend {choice!r} (use 'python' or 'compiled')")


def active_backend() -> str:
    """Name of the backend a fresh step would use right now."""
    return select_kernels().BACKEND_NAME


def compiled_available() -> bool:
    return _core is not None
