# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled accumulation kernels.

The cubature result must not depend on how the work is chunked, so both this
module and the pure-Python fallback accumulate strictly left to right with no
pairwise regrouping.  Compiled with -ffp-contract=off so the products round
the same way as the numpy fallback (no FMA).
"""


def weighted_sum(const double[::1] weights, const double[::1] values):
    """Strict left-to-right sum of weights[i]*values[i]."""
    cdef Py_ssize_t i, n = weights.shape[0]
    if values.shape[0] != n:
        raise ValueError("weights and values must have equal length")
    cdef double acc = 0.0
    with nogil:
        for i in range(n):
            acc += weights[i] * values[i]
    return acc


def sum_ltr(const double[::1] values):
    """Strict left-to-right sum of values."""
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double acc = 0.0
    with nogil:
        for i in range(n):
            acc += values[i]
    return acc


def row_weighted_sums(const double[::1] weights, const double[::1] values,
                      const long[::1] offsets, double[::1] out):
    """Per-row strict left-to-right sums of weights[i]*values[i].

    Row r covers the half-open index range offsets[r]..offsets[r+1].
    """
    cdef Py_ssize_t r, i, nrows = offsets.shape[0] - 1
    if out.shape[0] != nrows:
        raise ValueError("out must have len(offsets) - 1 entries")
    if weights.shape[0] != values.shape[0]:
        raise ValueError("weights and values must have equal length")
    cdef double acc
    with nogil:
        for r in range(nrows):
            acc = 0.0
            for i in range(offsets[r], offsets[r + 1]):
                acc += weights[i] * values[i]
            out[r] = acc
    return None
