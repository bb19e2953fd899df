"""Hot loops: RBO overlap curves, Lance-Williams merging, simple-path counting.

Two interchangeable backends share one signature set. ``RANKEDSIM_BACKEND``
picks one at import time: ``numba`` (default, falls back silently when numba
cannot be imported) or ``numpy``.
"""

import importlib
import os

TAIL_EXTRAPOLATE = 0
TAIL_FIXED_OVERLAP = 1

_requested = os.environ.get("RANKEDSIM_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"RANKEDSIM_BACKEND must be 'numba' or 'numpy', got {_requested!r}")


def get_backend(name):
    """Import a backend module by name (``"numba"`` or ``"numpy"``)."""
    return importlib.import_module(f"{__name__}._{name}")


try:
    _impl = get_backend(_requested)
    BACKEND = _requested
except ImportError:
    _impl = get_backend("numpy")
    BACKEND = "numpy"

overlap_curve = _impl.overlap_curve
rbo_from_overlap = _impl.rbo_from_overlap
rbo_pair = _impl.rbo_pair
rbo_matrix = _impl.rbo_matrix
lance_williams = _impl.lance_williams
simple_path_counts = _impl.simple_path_counts

__all__ = [
    "BACKEND",
    "TAIL_EXTRAPOLATE",
    "TAIL_FIXED_OVERLAP",
    "get_backend",
    "lance_williams",
    "overlap_curve",
    "rbo_from_overlap",
    "rbo_matrix",
    "rbo_pair",
    "simple_path_counts",
]
