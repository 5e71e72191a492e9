"""Kernel backend selection.

The compiled extension is used when importable; set ``MULTIGIANT_PURE=1``
to force the pure-Python implementation.
"""
import os

from . import _pykernels as python

if os.environ.get("MULTIGIANT_PURE", "") not in ("", "0"):
    compiled = None
else:
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

backend = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

explore = backend.explore
union_find = backend.union_find
simulate_bp = backend.simulate_bp

__all__ = ["BACKEND", "backend", "compiled", "python", "explore", "union_find", "simulate_bp"]
