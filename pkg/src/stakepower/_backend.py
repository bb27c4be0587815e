"""Kernel selection: compiled Cython kernels when importable, numpy otherwise.

Set ``STAKEPOWER_PURE_PYTHON=1`` to force the fallback.
"""

import os
from types import SimpleNamespace

from . import _fallback

_NAMES = ("pivot_counts", "cond_banzhaf", "ibeta")


def _namespace(module, name):
    return SimpleNamespace(name=name, **{k: getattr(module, k) for k in _NAMES})


PYTHON = _namespace(_fallback, "python")

try:
    from . import _kernels
except ImportError:  # extension not built
    CYTHON = None
else:
    CYTHON = _namespace(_kernels, "cython")

if CYTHON is not None and not os.environ.get("STAKEPOWER_PURE_PYTHON"):
    active = CYTHON
else:
    active = PYTHON

BACKEND = active.name


def get(name: str | None = None) -> SimpleNamespace:
    """Return the kernel set ``name`` (``"cython"``/``"python"``) or the active one."""
    if name is None:
        return active
    if name == "python":
        return PYTHON
    if name == "cython":
        if CYTHON is None:
            raise ImportError("compiled kernels are not available; rebuild the package")
        return CYTHON
    raise ValueError(f"unknown backend {name!r}")


def available() -> list[str]:
    return ["python"] + (["cython"] if CYTHON is not None else [])
