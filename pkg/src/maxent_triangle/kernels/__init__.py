"""Backend dispatch for the limb kernels.

numba is used when importable unless ``MAXENT_DISABLE_NUMBA`` is set to a
truthy value, in which case the pure-numpy implementations are used.
"""
import os
from types import ModuleType

from . import _numpy


def _want_numba() -> bool:
    return os.environ.get("MAXENT_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes", "on")


def get_backend(name: str) -> ModuleType:
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba
        return _numba
    raise ValueError(f"unknown kernel backend {name!r}")


try:
    if not _want_numba():
        raise ImportError
    from . import _numba as backend
    BACKEND = "numba"
except ImportError:
    backend = _numpy
    BACKEND = "numpy"

beta_interior = backend.beta_interior
apply_moves = backend.apply_moves
row_sums = backend.row_sums
normalize = backend.normalize
argmin = backend.argmin

__all__ = ["BACKEND", "get_backend", "beta_interior", "apply_moves", "row_sums",
           "normalize", "argmin"]
