"""Accumulation kernel selection.

Imports the compiled extension when available, otherwise the numpy fallback.
Set RELCUBE_PURE_PYTHON=1 to force the fallback (used by the benchmark and
by tests comparing the two implementations).
"""

import os

from . import _kernels_py

if os.environ.get("RELCUBE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    IMPLEMENTATION = "python"
else:
    try:
        from . import _kernels as _impl
        IMPLEMENTATION = "cython"
    except ImportError:
        _impl = _kernels_py
        IMPLEMENTATION = "python"

weighted_sum = _impl.weighted_sum
sum_ltr = _impl.sum_ltr
row_weighted_sums = _impl.row_weighted_sums

__all__ = ["weighted_sum", "sum_ltr", "row_weighted_sums", "IMPLEMENTATION"]
