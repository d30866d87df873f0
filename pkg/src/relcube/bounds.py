"""Grid estimation of the suprema the stepsize formula needs.

Three quantities feed the planner: the scale M (via ``sup_abs_on_region``),
the region breadth D, and the maxima of the r-th partial derivatives of the
scaled integrand.  All are estimated on a deterministic grid over the region,
with a fixed number of zoom-in rounds around the running maximizer.  The
derivative maxima are inflated by a safety factor since underestimating them
would undermine the error bound; D and M are reported as measured.

Derivative estimation uses central finite differences.  Near the region
boundary the stencil is shifted inward to stay inside the region; the value
at the original point is then recovered by linear extrapolation from two
shifted centers, which removes most of the bias this shift would otherwise
introduce when the maximum sits on the boundary.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CrossingLimitsError, NonFiniteValueError, StencilFitError

__all__ = ["SamplingConfig", "BoundSet", "sup_abs_on_region", "breadth_D",
           "derivative_sup", "estimate_bound_set", "refine_extremum_1d",
           "MU_DEFAULT"]

MU_DEFAULT = 1e-16

_FD_COEFFS = {
    2: np.array([1.0, -2.0, 1.0]),
    4: np.array([1.0, -4.0, 6.0, -4.0, 1.0]),
}


@dataclass(frozen=True)
class SamplingConfig:
    """Knobs for the grid estimators.

    ``fd_step`` of None picks mu**(1/(r+2)) at estimation time, balancing
    truncation against cancellation noise for interior maxima.
    """

    grid_points_per_axis: int = 201
    refine_rounds: int = 2
    safety_factor: float = 1.1
    fd_step: Optional[float] = None

    def __post_init__(self):
        if self.grid_points_per_axis < 2:
            raise ValueError("grid_points_per_axis must be >= 2")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")
        if self.safety_factor < 1.0:
            raise ValueError("safety_factor must be >= 1")
        if self.fd_step is not None and not self.fd_step > 0:
            raise ValueError("fd_step must be positive")


@dataclass(frozen=True)
class BoundSet:
    """D and the two derivative maxima, with their provenance."""

    d: float
    deriv_sup_x: float
    deriv_sup_y: float
    provenance: str  # "injected" or "grid-estimated"


def refine_extremum_1d(f, a, b, cfg, mode="max"):
    """Extremal value of f on [a, b]: coarse grid plus zoom-in rounds."""
    sign = 1.0 if mode == "max" else -1.0
    lo, hi = a, b
    n = cfg.grid_points_per_axis
    best = -np.inf
    best_x = a
    for _ in range(cfg.refine_rounds + 1):
        xs = np.linspace(lo, hi, n)
        vals = sign * np.asarray(f(xs), dtype=float)
        if not np.all(np.isfinite(vals)):
            i = int(np.argmin(np.isfinite(vals)))
            raise NonFiniteValueError(
                f"non-finite sample at x={float(xs[i])!r}", point=(xs[i],))
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_x = vals[i], xs[i]
        dx = (hi - lo) / (n - 1)
        lo = max(a, best_x - dx)
        hi = min(b, best_x + dx)
        n = 21
    return sign * best


def _refine_2d(grid_values, cfg):
    """Maximum of a field over the unit (w, t) square with zoom rounds.

    ``grid_values(w_axis, t_axis)`` returns the field on the tensor grid;
    entries of -inf mark points that do not participate.
    """
    w_lo = t_lo = 0.0
    w_hi = t_hi = 1.0
    n = cfg.grid_points_per_axis
    best = -np.inf
    best_w = best_t = 0.0
    for _ in range(cfg.refine_rounds + 1):
        w_axis = np.linspace(w_lo, w_hi, n)
        t_axis = np.linspace(t_lo, t_hi, n)
        vals = grid_values(w_axis, t_axis)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if vals[i, j] > best:
            best = float(vals[i, j])
            best_w, best_t = float(w_axis[i]), float(t_axis[j])
        dw = (w_hi - w_lo) / (n - 1)
        dt = (t_hi - t_lo) / (n - 1)
        w_lo, w_hi = max(0.0, best_w - dw), min(1.0, best_w + dw)
        t_lo, t_hi = max(0.0, best_t - dt), min(1.0, best_t + dt)
        n = 21
    return best, best_w, best_t


def _row_bounds(l_t, u_t, w_axis):
    lo = np.asarray(l_t(w_axis), dtype=float)
    hi = np.asarray(u_t(w_axis), dtype=float)
    return lo, hi


def sup_abs_on_region(f, l_t, u_t, cfg=None):
    """safety_factor times the grid-refined max of |f| over the region.

    f is a function of (w, z); the region is z between l_t(w) and u_t(w)
    for w in [0, 1].  Raises on non-finite samples, naming the point.
    """
    if cfg is None:
        cfg = SamplingConfig()

    def grid_values(w_axis, t_axis):
        lo, hi = _row_bounds(l_t, u_t, w_axis)
        w = w_axis[:, None]
        z = lo[:, None] + t_axis[None, :] * (hi - lo)[:, None]
        vals = np.abs(np.asarray(f(np.broadcast_to(w, z.shape), z), dtype=float))
        if not np.all(np.isfinite(vals)):
            i, j = np.unravel_index(
                int(np.argmin(np.isfinite(vals))), vals.shape)
            raise NonFiniteValueError(
                f"non-finite sample at (w, z)=({float(w_axis[i])!r}, {float(z[i, j])!r})",
                point=(w_axis[i], z[i, j]))
        return vals

    best, _, _ = _refine_2d(grid_values, cfg)
    return cfg.safety_factor * best


def breadth_D(l_t, u_t, cfg=None):
    """Grid-refined max of (u_t - l_t) on [0, 1]; no safety inflation.

    D enters the stepsize denominator, where padding it would only shrink h
    further; reporting the measured breadth keeps the roundoff floor honest
    (D <= 1 for normalized problems).
    """
    if cfg is None:
        cfg = SamplingConfig()

    def gap(w):
        lo, hi = _row_bounds(l_t, u_t, np.asarray(w, dtype=float))
        return hi - lo

    best = refine_extremum_1d(gap, 0.0, 1.0, cfg, mode="max")
    if best < -1e-12:
        raise CrossingLimitsError(
            f"negative breadth detected: max(u-l) = {float(best)!r}")
    return max(best, 0.0)


def _extrapolate_to_boundary(v1, v2, second_ok):
    """Recover the FD magnitude at a clamped grid point.

    v1 and v2 are the FD values at the shifted center and at twice the
    shift.  Linear extrapolation back to the original point is only trusted
    when the two samples agree in sign and decay away from the boundary --
    the signature of the smooth falloff the shift introduced.  Anything
    else (sign flips under oscillation, growth toward the interior) keeps
    the plain magnitude, which the grid maximum elsewhere dominates anyway.
    """
    mag1 = np.abs(v1)
    mag2 = np.abs(v2)
    trust = second_ok & (v1 * v2 > 0.0) & (mag1 >= mag2)
    return np.where(trust, 2.0 * mag1 - mag2, mag1)


def _fd_field_z(g, l_t, u_t, coeffs, halfspan, step, w_axis, t_axis):
    """|d^r g / dz^r| FD estimates on the (w, t) grid, stencil along z."""
    lo, hi = _row_bounds(l_t, u_t, w_axis)
    z_min = lo + halfspan * step
    z_max = hi - halfspan * step
    fits = z_max >= z_min  # rows thick enough for the stencil
    w = np.broadcast_to(w_axis[:, None], (w_axis.size, t_axis.size))
    z = lo[:, None] + t_axis[None, :] * (hi - lo)[:, None]
    z_c = np.clip(z, z_min[:, None], z_max[:, None])

    r = len(coeffs) - 1

    def fd(z_center):
        acc = np.zeros_like(z_center)
        for k, c in enumerate(coeffs):
            acc += c * np.asarray(g(w, z_center + (k - halfspan) * step), float)
        return acc / step ** r

    v1 = fd(z_c)
    shift = z_c - z
    z_c2 = z_c + shift
    second_ok = (shift != 0.0) & (z_c2 >= z_min[:, None]) & (z_c2 <= z_max[:, None])
    if np.any(second_ok):
        v2 = fd(np.where(second_ok, z_c2, z_c))
        est = _extrapolate_to_boundary(v1, v2, second_ok)
    else:
        est = np.abs(v1)
    est[~fits, :] = -np.inf
    bad = fits[:, None] & ~np.isfinite(est) & (est != -np.inf)
    if np.any(bad):
        i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
        raise NonFiniteValueError(
            f"non-finite difference at (w, z)=({float(w_axis[i])!r}, {float(z[i, j])!r})",
            point=(w_axis[i], z[i, j]))
    return est


def _fd_field_w(g, l_t, u_t, coeffs, halfspan, step, w_axis, t_axis):
    """|d^r g / dw^r| FD estimates on the (w, t) grid, stencil along w."""
    r = len(coeffs) - 1
    w_c = np.clip(w_axis, halfspan * step, 1.0 - halfspan * step)

    def stencil_bounds(w_centers):
        """Common z-interval of all stencil columns at each center."""
        z_lo = None
        z_hi = None
        for k in range(len(coeffs)):
            ws = w_centers + (k - halfspan) * step
            lo, hi = _row_bounds(l_t, u_t, ws)
            z_lo = lo if z_lo is None else np.maximum(z_lo, lo)
            z_hi = hi if z_hi is None else np.minimum(z_hi, hi)
        return z_lo, z_hi

    z_lo1, z_hi1 = stencil_bounds(w_c)
    fits = z_hi1 >= z_lo1
    lo, hi = _row_bounds(l_t, u_t, w_axis)
    z = lo[:, None] + t_axis[None, :] * (hi - lo)[:, None]
    z_c = np.clip(z, z_lo1[:, None], z_hi1[:, None])

    def fd(w_centers_col, z_center):
        acc = np.zeros_like(z_center)
        for k, c in enumerate(coeffs):
            acc += c * np.asarray(
                g(w_centers_col + (k - halfspan) * step, z_center), float)
        return acc / step ** r

    v1 = fd(w_c[:, None], z_c)
    dw = w_c - w_axis
    dz = z_c - z
    w_c2 = w_c + dw
    z_c2 = z_c + dz
    in_axis = (w_c2 >= halfspan * step) & (w_c2 <= 1.0 - halfspan * step)
    z_lo2, z_hi2 = stencil_bounds(np.clip(w_c2, halfspan * step,
                                          1.0 - halfspan * step))
    shifted = (dw[:, None] != 0.0) | (dz != 0.0)
    second_ok = (shifted & in_axis[:, None] & (z_hi2 >= z_lo2)[:, None]
                 & (z_c2 >= z_lo2[:, None]) & (z_c2 <= z_hi2[:, None]))
    if np.any(second_ok):
        v2 = fd(w_c2[:, None], np.where(second_ok, z_c2, z_c))
        est = _extrapolate_to_boundary(v1, v2, second_ok)
    else:
        est = np.abs(v1)
    est[~fits, :] = -np.inf
    bad = fits[:, None] & ~np.isfinite(est) & (est != -np.inf)
    if np.any(bad):
        i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
        raise NonFiniteValueError(
            f"non-finite difference at (w, z)=({float(w_axis[i])!r}, {float(z[i, j])!r})",
            point=(w_axis[i], z[i, j]))
    return est


def derivative_sup(prob, axis, r, cfg=None):
    """Estimated max of |d^r g / d(axis)^r| over the transformed region.

    Returns the user's analytic bound verbatim when one was supplied;
    otherwise safety_factor times the grid-refined finite-difference max.
    """
    if cfg is None:
        cfg = SamplingConfig()
    if axis not in ("w", "z"):
        raise ValueError(f"axis must be 'w' or 'z', got {axis!r}")
    if r not in _FD_COEFFS:
        raise ValueError(f"r must be one of {sorted(_FD_COEFFS)}, got {r}")

    overrides = getattr(prob.integrand, "analytic_bounds", None)
    if overrides is not None:
        injected = (overrides.deriv_sup_x if axis == "w"
                    else overrides.deriv_sup_y)
        if injected is not None:
            return float(injected)

    coeffs = _FD_COEFFS[r]
    halfspan = (len(coeffs) - 1) // 2
    step = cfg.fd_step if cfg.fd_step is not None else MU_DEFAULT ** (1.0 / (r + 2))
    field = _fd_field_w if axis == "w" else _fd_field_z

    def grid_values(w_axis, t_axis):
        return field(prob.g, prob.l_tilde, prob.u_tilde, coeffs, halfspan,
                     step, w_axis, t_axis)

    best, _, _ = _refine_2d(grid_values, cfg)
    if not np.isfinite(best):
        raise StencilFitError(
            f"no {axis}-axis stencil of span {2 * halfspan * step:g} fits"
            " inside the region; supply analytic derivative bounds instead")
    return cfg.safety_factor * best


def estimate_bound_set(prob, r, cfg=None):
    """Assemble D and both derivative maxima for the stepsize formula.

    Each component honours a user override; provenance is "injected" only
    when every component was supplied.
    """
    if cfg is None:
        cfg = SamplingConfig()
    overrides = getattr(prob.integrand, "analytic_bounds", None)

    if overrides is not None and overrides.d is not None:
        d = float(overrides.d)
        d_injected = True
    else:
        d = breadth_D(prob.l_tilde, prob.u_tilde, cfg)
        d_injected = False

    sx = derivative_sup(prob, "w", r, cfg)
    sy = derivative_sup(prob, "z", r, cfg)
    sx_injected = overrides is not None and overrides.deriv_sup_x is not None
    sy_injected = overrides is not None and overrides.deriv_sup_y is not None

    provenance = ("injected" if d_injected and sx_injected and sy_injected
                  else "grid-estimated")
    return BoundSet(d=d, deriv_sup_x=sx, deriv_sup_y=sy, provenance=provenance)
