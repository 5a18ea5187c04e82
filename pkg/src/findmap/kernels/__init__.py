"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``FINDMAP_DISABLE_NUMBA=1`` to force the numpy implementations; they
are also used when numba cannot be imported.
"""
import os
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import _numpy

BACKEND = "numpy"
_impl = _numpy

if os.environ.get("FINDMAP_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes"):
    try:
        from . import _numba

        _impl = _numba
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is optional at runtime
        pass

accusation_matrix = _impl.accusation_matrix
min_triangle_area_with = _impl.min_triangle_area_with
min_circle_residual_with = _impl.min_circle_residual_with
min_conic_det_with = _impl.min_conic_det_with
conic_dets = _impl.conic_dets
grid_scan = _impl.grid_scan


@lru_cache(maxsize=None)
def combos(k: int, r: int) -> np.ndarray:
    """All r-subsets of range(k) as an int64 array of shape (C(k, r), r)."""
    arr = np.array(list(combinations(range(k), r)), dtype=np.int64)
    return arr.reshape(-1, r)
