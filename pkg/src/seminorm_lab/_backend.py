"""Kernel selection.

The compiled extension is used when it imports cleanly; otherwise the NumPy
twins take over. Setting ``SEMINORM_LAB_PURE=1`` forces the fallback, which is
how the benchmark and the backend-agreement tests reach both paths.
"""
import os

from . import _kernels_py as fallback

try:
    if os.environ.get("SEMINORM_LAB_PURE") == "1":
        raise ImportError("pure backend requested")
    from . import _kernels as compiled
except ImportError:
    compiled = None

kernels = compiled if compiled is not None else fallback
BACKEND = "compiled" if compiled is not None else "numpy"

__all__ = ["kernels", "compiled", "fallback", "BACKEND"]
