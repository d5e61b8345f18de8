"""Hot pixel kernels with a numba fast path and a pure-numpy fallback.

Set SAMTRACK_NO_NUMBA=1 to force the numpy path. Both backends stay
importable as kernels.numpy_impl / kernels.numba_impl so tests can compare
them directly regardless of the selected default.
"""
import os

from . import numpy_impl

_DISABLED = os.environ.get("SAMTRACK_NO_NUMBA", "").lower() in ("1", "true", "yes")

if not _DISABLED:
    try:
        from . import numba_impl as _active
        ACTIVE_BACKEND = "numba"
    except ImportError:
        _active = numpy_impl
        ACTIVE_BACKEND = "numpy"
else:
    _active = numpy_impl
    ACTIVE_BACKEND = "numpy"

label_components_4 = _active.label_components_4
dilate_disc = _active.dilate_disc
rle_encode_bits = _active.rle_encode_bits
best_shift = _active.best_shift

__all__ = [
    "ACTIVE_BACKEND",
    "label_components_4",
    "dilate_disc",
    "rle_encode_bits",
    "best_shift",
    "numpy_impl",
]
