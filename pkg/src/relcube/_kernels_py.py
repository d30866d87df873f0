"""Pure-Python (numpy) fallback for the compiled kernels.

``np.add.accumulate`` is a sequential scan, so its final element is the
strict left-to-right sum -- bitwise identical to the compiled loop as long
as the extension is built without FMA contraction.
"""

import numpy as np


def weighted_sum(weights, values):
    """Strict left-to-right sum of weights[i]*values[i]."""
    if len(weights) != len(values):
        raise ValueError("weights and values must have equal length")
    if len(weights) == 0:
        return 0.0
    return float(np.add.accumulate(np.multiply(weights, values))[-1])


def sum_ltr(values):
    """Strict left-to-right sum of values."""
    if len(values) == 0:
        return 0.0
    return float(np.add.accumulate(np.asarray(values, dtype=float))[-1])


def row_weighted_sums(weights, values, offsets, out):
    """Per-row strict left-to-right sums of weights[i]*values[i].

    Row r covers the half-open index range offsets[r]..offsets[r+1].
    """
    if len(out) != len(offsets) - 1:
        raise ValueError("out must have len(offsets) - 1 entries")
    if len(weights) != len(values):
        raise ValueError("weights and values must have equal length")
    products = np.multiply(weights, values)
    for r in range(len(out)):
        start, end = offsets[r], offsets[r + 1]
        if end > start:
            out[r] = np.add.accumulate(products[start:end])[-1]
        else:
            out[r] = 0.0
    return None
