"""Problem definition and affine normalization onto the unit square.

The original task is the integral of G over a <= x <= b, l(x) <= y <= u(x).
``normalize`` maps x and y affinely to (w, z) in [0,1]^2, rescales the
integrand by its grid-estimated magnitude M so |g| <= 1 on the transformed
region, and returns everything the planner and the error controller need.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import bounds
from .errors import CrossingLimitsError, NonFiniteValueError

__all__ = ["Region", "Integrand", "BoundOverrides", "NormalizedProblem",
           "normalize", "eval_g", "vectorized_1d", "vectorized_2d"]


def vectorized_1d(f):
    """Adapt a univariate callable so it accepts numpy arrays.

    Vectorized callables pass through; scalar-only ones get an element loop.
    The decision is made on the first array call so no probe points outside
    the caller's domain are ever evaluated.
    """
    state = {}

    def call(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return float(f(float(x)))
        mode = state.get("mode")
        if mode is None:
            try:
                out = np.asarray(f(x), dtype=float)
                if out.shape == x.shape:
                    state["mode"] = "vector"
                    return out
                if out.ndim == 0:
                    state["mode"] = "vector-bcast"
                    return np.full(x.shape, float(out))
            except Exception:
                pass
            state["mode"] = "loop"
        if state["mode"] == "vector":
            return np.asarray(f(x), dtype=float)
        if state["mode"] == "vector-bcast":
            return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy()
        out = np.empty(x.shape)
        flat_x, flat_out = x.ravel(), out.ravel()
        for i in range(flat_x.size):
            flat_out[i] = f(flat_x[i])
        return out

    return call


def vectorized_2d(f):
    """Same adaptation as ``vectorized_1d`` for callables of (x, y)."""
    state = {}

    def call(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim == 0 and y.ndim == 0:
            return float(f(float(x), float(y)))
        shape = np.broadcast_shapes(x.shape, y.shape)
        mode = state.get("mode")
        if mode is None:
            try:
                out = np.asarray(f(x, y), dtype=float)
                if out.shape == shape:
                    state["mode"] = "vector"
                    return out
                if out.ndim == 0:
                    state["mode"] = "vector-bcast"
                    return np.full(shape, float(out))
            except Exception:
                pass
            state["mode"] = "loop"
        if state["mode"] == "vector":
            return np.asarray(f(x, y), dtype=float)
        if state["mode"] == "vector-bcast":
            return np.broadcast_to(np.asarray(f(x, y), dtype=float), shape).copy()
        xb, yb = np.broadcast_arrays(x, y)
        out = np.empty(shape)
        flat_x, flat_y, flat_out = xb.ravel(), yb.ravel(), out.ravel()
        for i in range(flat_x.size):
            flat_out[i] = f(flat_x[i], flat_y[i])
        return out

    return call


@dataclass(frozen=True)
class Region:
    """Integration domain a <= x <= b, lower(x) <= y <= upper(x)."""

    a: float
    b: float
    lower: Callable
    upper: Callable

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class BoundOverrides:
    """User-supplied suprema; any non-None value is used verbatim."""

    m: Optional[float] = None
    d: Optional[float] = None
    deriv_sup_x: Optional[float] = None
    deriv_sup_y: Optional[float] = None

    def merged_over(self, other):
        """Overrides from self win; gaps fall back to ``other``."""
        if other is None:
            return self
        return BoundOverrides(
            m=self.m if self.m is not None else other.m,
            d=self.d if self.d is not None else other.d,
            deriv_sup_x=(self.deriv_sup_x if self.deriv_sup_x is not None
                         else other.deriv_sup_x),
            deriv_sup_y=(self.deriv_sup_y if self.deriv_sup_y is not None
                         else other.deriv_sup_y),
        )


@dataclass(frozen=True)
class Integrand:
    """The function G(x, y), plus optional analytic bound overrides."""

    eval: Callable
    analytic_bounds: Optional[BoundOverrides] = None


@dataclass(frozen=True)
class NormalizedProblem:
    """The transformed, scaled problem on the unit square.

    g(w, z) = G(m1*w + a, m2*z + l1) * m1 * m2 / M, with |g| <= 1 on the
    transformed region and M >= 1; l_tilde/u_tilde bound the region in z.
    """

    m1: float
    m2: float
    l1: float
    u1: float
    big_m: float
    g: Callable
    l_tilde: Callable
    u_tilde: Callable
    region: Region
    integrand: Integrand

    def to_original(self, w, z):
        """Map unit-square coordinates back to (x, y)."""
        return self.m1 * w + self.region.a, self.m2 * z + self.l1

    @property
    def normalized_region(self):
        """The transformed domain as a Region on [0, 1]."""
        return Region(a=0.0, b=1.0, lower=self.l_tilde, upper=self.u_tilde)


def _limit_extremes(region, cfg):
    """Grid-refined min and max of {l(x), u(x)} over [a, b]."""
    lower = vectorized_1d(region.lower)
    upper = vectorized_1d(region.upper)

    lo = min(
        bounds.refine_extremum_1d(lower, region.a, region.b, cfg, mode="min"),
        bounds.refine_extremum_1d(upper, region.a, region.b, cfg, mode="min"),
    )
    hi = max(
        bounds.refine_extremum_1d(lower, region.a, region.b, cfg, mode="max"),
        bounds.refine_extremum_1d(upper, region.a, region.b, cfg, mode="max"),
    )
    return lo, hi


def normalize(region, integrand, cfg=None):
    """Transform and scale the problem onto the unit square.

    M is the grid-refined maximum of |G~ * m1 * m2| over the transformed
    region (floored at 1), taken without the safety inflation used for
    derivative bounds: the error-report identities need the actual scale,
    not a padded one.  A user override in ``integrand.analytic_bounds.m``
    wins outright.
    """
    if cfg is None:
        cfg = bounds.SamplingConfig()

    lower = vectorized_1d(region.lower)
    upper = vectorized_1d(region.upper)
    g_eval = vectorized_2d(integrand.eval)

    xs = np.linspace(region.a, region.b, cfg.grid_points_per_axis)
    lo_vals = lower(xs)
    up_vals = upper(xs)
    for name, vals in (("lower limit", lo_vals), ("upper limit", up_vals)):
        if not np.all(np.isfinite(vals)):
            i = int(np.argmin(np.isfinite(vals)))
            raise NonFiniteValueError(
                f"{name} is not finite at x={float(xs[i])!r}", point=(xs[i],))
    gap = up_vals - lo_vals
    if np.any(gap < -1e-12 * np.maximum(1.0, np.abs(up_vals) + np.abs(lo_vals))):
        i = int(np.argmin(gap))
        raise CrossingLimitsError(
            f"crossing limits unsupported: l(x) > u(x) at x={float(xs[i])!r}"
            f" (l={float(lo_vals[i])!r}, u={float(up_vals[i])!r})")

    l1, u1 = _limit_extremes(region, cfg)
    m1 = region.b - region.a
    m2 = u1 - l1
    a = region.a

    if m2 == 0.0:
        # Zero-breadth region: the integral is 0; keep everything well
        # defined so downstream planning yields empty rows.
        def zero_g(w, z):
            return np.zeros(np.broadcast_shapes(
                np.asarray(w, float).shape, np.asarray(z, float).shape))

        def flat(w):
            w = np.asarray(w, dtype=float)
            return np.zeros(w.shape) if w.ndim else 0.0

        return NormalizedProblem(m1=m1, m2=0.0, l1=l1, u1=u1, big_m=1.0,
                                 g=zero_g, l_tilde=flat, u_tilde=flat,
                                 region=region, integrand=integrand)

    def l_tilde(w):
        return (lower(m1 * np.asarray(w, dtype=float) + a) - l1) / m2

    def u_tilde(w):
        return (upper(m1 * np.asarray(w, dtype=float) + a) - l1) / m2

    def scaled_abs_g(w, z):
        x = m1 * np.asarray(w, dtype=float) + a
        y = m2 * np.asarray(z, dtype=float) + l1
        return np.abs(g_eval(x, y) * m1 * m2)

    overrides = integrand.analytic_bounds
    if overrides is not None and overrides.m is not None:
        big_m = float(overrides.m)
    else:
        sup = bounds.sup_abs_on_region(
            scaled_abs_g, l_tilde, u_tilde, replace(cfg, safety_factor=1.0))
        big_m = max(1.0, sup)

    def g(w, z):
        x = m1 * np.asarray(w, dtype=float) + a
        y = m2 * np.asarray(z, dtype=float) + l1
        return g_eval(x, y) * m1 * m2 / big_m

    return NormalizedProblem(m1=m1, m2=m2, l1=l1, u1=u1, big_m=big_m, g=g,
                             l_tilde=l_tilde, u_tilde=u_tilde,
                             region=region, integrand=integrand)


def eval_g(prob, w, z):
    """Evaluate the scaled integrand at (w, z) on the unit square."""
    out = prob.g(w, z)
    if np.ndim(out) == 0:
        return float(out)
    return out
