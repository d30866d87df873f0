"""Independent reference integrator for tests and expected-value generation.

Nested composite two-point Gauss-Legendre quadrature with panel counts
doubling until two successive refinements agree to the requested relative
tolerance.  It deliberately shares nothing with the engine's planner beyond
the rule registry: panels are laid out directly here, every row uses the
same panel count, and sums are plain numpy reductions.  A planner bug in
the engine therefore cannot confirm itself through this module.
"""

from dataclasses import dataclass

import numpy as np

from . import rules
from .errors import NonFiniteValueError
from .problem import vectorized_1d, vectorized_2d

__all__ = ["OracleResult", "reference_integral"]

_MAX_DOUBLINGS = 8
_START_PANELS = 64
_X_CHUNK = 128


@dataclass(frozen=True)
class OracleResult:
    """Reference value with its convergence trail."""

    value: float
    resolution_sequence: tuple
    converged: bool


def _nested_gauss(g, lower, upper, a, b, n_panels):
    """Nested composite GL2 with n_panels per axis, chunked over x."""
    rule = rules.get_rule("gauss_legendre_2")
    offs = np.asarray(rule.panel_nodes)          # per-panel positions in [0,1]
    wrel = np.asarray(rule.panel_weights)

    hx = (b - a) / n_panels
    starts = a + hx * np.arange(n_panels)
    xs = (starts[:, None] + hx * offs[None, :]).ravel()
    wx = hx * np.tile(wrel, n_panels)

    # Inner panel layout in unit coordinates, scaled per row by the breadth.
    t = ((np.arange(n_panels)[:, None] + offs[None, :]) / n_panels).ravel()
    wt = np.tile(wrel, n_panels) / n_panels

    total = 0.0
    for s in range(0, xs.size, _X_CHUNK):
        x_chunk = xs[s:s + _X_CHUNK]
        lo = np.asarray(lower(x_chunk), dtype=float)[:, None]
        hi = np.asarray(upper(x_chunk), dtype=float)[:, None]
        ys = lo + (hi - lo) * t[None, :]
        vals = g(x_chunk[:, None], ys)
        if not np.all(np.isfinite(vals)):
            i, j = np.unravel_index(int(np.argmin(np.isfinite(vals))),
                                    vals.shape)
            raise NonFiniteValueError(
                f"integrand not finite at (x={float(x_chunk[i])!r}, y={float(ys[i, j])!r})",
                point=(x_chunk[i], ys[i, j]))
        row_vals = (hi - lo)[:, 0] * (vals @ wt)
        total += float(wx[s:s + _X_CHUNK] @ row_vals)
    return total


def reference_integral(region, integrand, rel_target=1e-12):
    """High-accuracy value of the integral over ``region``.

    Doubles the per-axis panel count from 64 until two successive values
    agree to ``rel_target`` relative to the latest one.  Raises after 8
    doublings without agreement.
    """
    if rel_target < 1e-13:
        raise ValueError("rel_target below 1e-13 is not resolvable in"
                         " double precision")
    g = vectorized_2d(integrand.eval)
    lower = vectorized_1d(region.lower)
    upper = vectorized_1d(region.upper)

    n = _START_PANELS
    sequence = []
    prev = None
    for _ in range(_MAX_DOUBLINGS + 1):
        value = _nested_gauss(g, lower, upper, region.a, region.b, n)
        sequence.append((n, value))
        if prev is not None and abs(value - prev) <= rel_target * abs(value):
            return OracleResult(value=value,
                                resolution_sequence=tuple(sequence),
                                converged=True)
        prev = value
        n *= 2
    raise RuntimeError(
        f"reference integral did not converge to {rel_target:g} after"
        f" {_MAX_DOUBLINGS} doublings (last values"
        f" {sequence[-2][1]!r}, {sequence[-1][1]!r})")
