"""Backend selection for the batch predicates.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py``. Set ``SUBTILE_PURE_PYTHON=1`` to force
the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("SUBTILE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

classify_convex = _impl.classify_convex
points_inside = _impl.points_inside
balls_meet = _impl.balls_meet


def get_backend(name: str):
    """Return the kernel module for ``"python"`` or ``"cython"`` (for benchmarks and tests)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
