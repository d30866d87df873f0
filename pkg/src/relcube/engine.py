"""Stepsize selection, grid planning, and composite cubature evaluation.

Given a tolerance and the bound set (breadth D and the two r-th derivative
maxima), the ideal stepsize is

    h = ((eps - 4*(b-a)*D*mu) / (A(r)*(b-a)*D*(Sx + Sy)))**(1/r)

where the numerator subtracts the roundoff floor of positive-weight
composite cubature.  The grid then uses N1 = ceil((b-a)/h) outer panels,
and one inner composite quadrature per outer node over [l(x_i), u(x_i)]
with N2_i = ceil((u(x_i)-l(x_i))/h) panels.  Evaluation sums rows bottom-up
with a fixed left-to-right order so results are bit-reproducible.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels, rules
from .bounds import MU_DEFAULT
from .errors import NonFiniteValueError, ToleranceFloorError
from .problem import vectorized_1d, vectorized_2d

__all__ = ["GridPlan", "CubatureValue", "select_stepsize", "plan_grid",
           "evaluate", "roundoff_bound"]

# Nearly-integer panel ratios snap to the integer instead of rounding up,
# so h = extent/n does not produce n+1 panels through float noise.  The
# window is absolute in the ratio, keeping k* <= h*(1 + 1e-12).
_CEIL_SNAP = 1e-12


def _ceil_snapped(ratio):
    nearest = np.round(ratio)
    out = np.ceil(ratio)
    snap = np.abs(ratio - nearest) <= _CEIL_SNAP
    if np.ndim(out) == 0:
        return int(nearest) if snap else int(out)
    out = out.astype(np.int64)
    out[snap] = nearest[snap].astype(np.int64)
    return out


def roundoff_bound(extent, d, mu):
    """Roundoff-error bound 4*(b-a)*D*mu of positive-weight cubature."""
    return 4.0 * extent * d * mu


def select_stepsize(eps, mu, rule, extent, bound_set):
    """Ideal stepsize h for absolute tolerance eps on the given problem.

    Raises ToleranceFloorError when eps does not exceed the roundoff floor.
    A flat integrand (both derivative maxima zero) or a zero-breadth region
    needs no refinement at all; h is then capped at the region extent.
    """
    floor = roundoff_bound(extent, bound_set.d, mu)
    if not eps > floor:
        raise ToleranceFloorError(
            f"tolerance {eps:g} is below the roundoff floor"
            f" 4*(b-a)*D*mu = {floor:g}; no stepsize can achieve it",
            floor=floor)
    deriv_sum = bound_set.deriv_sup_x + bound_set.deriv_sup_y
    denom = rule.err_const_A * extent * bound_set.d * deriv_sum
    if denom == 0.0:
        return float(extent)
    h = ((eps - floor) / denom) ** (1.0 / rule.order_r)
    return float(min(h, extent))


@dataclass
class GridPlan:
    """Node layout for one composite cubature evaluation.

    Outer nodes cover [a, b]; each carries a reduced composite weight and a
    row of inner nodes spanning [l(x_i), u(x_i)].  Rows with zero breadth
    have n2 = 0 and k_star = 0 and contribute nothing.  Row nodes are
    generated on demand (a refined plan can hold 1e8+ of them).
    """

    h: float
    h_star: float
    n1: int
    rule: rules.RuleSpec
    a: float
    b: float
    outer_nodes: np.ndarray
    outer_weights: np.ndarray  # reduced; h_star * outer_weights are absolute
    row_lower: np.ndarray
    row_upper: np.ndarray
    n2: np.ndarray
    k_star: np.ndarray

    @property
    def extent(self):
        return self.b - self.a

    @property
    def max_k_star(self):
        return float(self.k_star.max()) if self.k_star.size else 0.0

    @property
    def max_breadth(self):
        gaps = self.row_upper - self.row_lower
        return float(gaps.max()) if gaps.size else 0.0

    @property
    def nodes_total(self):
        per_panel = self.rule.nodes_per_panel
        if self.rule.closed:
            per_row = (per_panel - 1) * self.n2 + 1
        else:
            per_row = per_panel * self.n2
        return int(per_row[self.n2 > 0].sum())

    def row_nodes(self, i):
        """Inner nodes of row i (empty when the row has zero breadth)."""
        if self.n2[i] == 0:
            return np.empty(0)
        _, _, ys, _ = _flat_rows(self.rule, self.n2[i:i + 1],
                                 self.row_lower[i:i + 1],
                                 self.row_upper[i:i + 1])
        return ys

    def row_weights(self, i):
        """Reduced inner weights of row i, aligned with ``row_nodes(i)``."""
        if self.n2[i] == 0:
            return np.empty(0)
        _, _, _, wts = _flat_rows(self.rule, self.n2[i:i + 1],
                                  self.row_lower[i:i + 1],
                                  self.row_upper[i:i + 1])
        return wts


def plan_grid(h, region, rule, inner_h=None):
    """Lay out the composite grid for stepsize h over ``region``.

    ``region`` needs attributes a, b and callables lower/upper; a
    NormalizedProblem's view works via ``normalized_region``.  ``inner_h``
    overrides the inner-axis stepsize (the two axes share h by default).
    """
    if not h > 0:
        raise ValueError(f"stepsize must be positive, got {h!r}")
    k = h if inner_h is None else inner_h
    if not k > 0:
        raise ValueError(f"inner stepsize must be positive, got {k!r}")
    a, b = region.a, region.b
    n1 = max(1, _ceil_snapped((b - a) / h))
    h_star = (b - a) / n1
    outer_nodes = rules.composite_nodes(rule, n1, a, b)
    outer_weights = rules.reduced_pattern(rule, n1)

    lower = vectorized_1d(region.lower)
    upper = vectorized_1d(region.upper)
    row_lower = np.asarray(lower(outer_nodes), dtype=float)
    row_upper = np.asarray(upper(outer_nodes), dtype=float)
    gaps = row_upper - row_lower
    tiny = 1e-12 * np.maximum(1.0, np.abs(row_upper) + np.abs(row_lower))
    gaps = np.where(np.abs(gaps) <= tiny, 0.0, gaps)
    if np.any(gaps < 0):
        i = int(np.argmin(gaps))
        raise ValueError(
            f"upper limit below lower limit at x={outer_nodes[i]!r}")

    n2 = np.zeros(outer_nodes.size, dtype=np.int64)
    k_star = np.zeros(outer_nodes.size)
    occupied = gaps > 0
    n2[occupied] = _ceil_snapped(gaps[occupied] / k)
    k_star[occupied] = gaps[occupied] / n2[occupied]

    return GridPlan(h=float(h), h_star=float(h_star), n1=int(n1), rule=rule,
                    a=float(a), b=float(b), outer_nodes=outer_nodes,
                    outer_weights=outer_weights, row_lower=row_lower,
                    row_upper=row_upper, n2=n2, k_star=k_star)


@dataclass(frozen=True)
class CubatureValue:
    """Cubature result with its node count and roundoff bound."""

    value: float
    nodes_evaluated: int
    roundoff_bound: float


def _flat_rows(rule, ns, lows, ups):
    """Concatenated inner nodes and reduced weights for a batch of rows.

    ``ns`` holds the panel count of each row (all >= 1), ``lows``/``ups``
    the row limits.  Returns (counts, offsets, nodes, weights) with row r
    occupying the half-open slice offsets[r]:offsets[r+1].
    """
    m = rule.nodes_per_panel
    pw = np.asarray(rule.panel_weights)
    if rule.closed:
        counts = (m - 1) * ns + 1
    else:
        counts = m * ns
    offsets = np.zeros(ns.size + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    total = int(offsets[-1])
    row_id = np.repeat(np.arange(ns.size), counts)
    pos = np.arange(total, dtype=np.int64) - offsets[row_id]
    gaps = ups - lows

    if rule.closed:
        frac = pos / (counts - 1)[row_id]
        nodes = lows[row_id] + gaps[row_id] * frac
        nodes[offsets[1:] - 1] = ups  # last node lands exactly on u(x_i)
        rel = pos % (m - 1)
        weights = pw[rel]
        is_last = pos == (counts - 1)[row_id]
        shared = (rel == 0) & (pos > 0) & ~is_last
        weights[shared] = pw[0] + pw[-1]
        weights[is_last] = pw[-1]
    else:
        panel = pos // m
        within = pos % m
        offs = np.asarray(rule.panel_nodes)
        frac = (panel + offs[within]) / ns[row_id]
        nodes = lows[row_id] + gaps[row_id] * frac
        weights = pw[within]
    return counts, offsets, nodes, weights


def evaluate(g, plan, mu=MU_DEFAULT, compensated=False, chunk_nodes=1 << 21):
    """Composite cubature of g over the planned grid.

    Each row is integrated by the rule's inner composite quadrature
    (reduced weights times k*_i), then the row results are combined by the
    outer composite quadrature (reduced weights times h*).  Summation is
    strictly ascending within rows and across rows, so the value is
    independent of ``chunk_nodes`` (which only batches the integrand
    calls).  ``compensated=True`` swaps in exactly-rounded summation at
    some cost in speed.

    Raises NonFiniteValueError naming the first offending node if g is not
    finite somewhere on the grid.
    """
    g = vectorized_2d(g)
    rule = plan.rule
    occupied = np.flatnonzero(plan.n2 > 0)

    outer_acc = 0.0
    outer_terms = [] if compensated else None
    nodes_evaluated = 0

    if occupied.size:
        if rule.closed:
            counts_all = (rule.nodes_per_panel - 1) * plan.n2[occupied] + 1
        else:
            counts_all = rule.nodes_per_panel * plan.n2[occupied]
        cum = np.cumsum(counts_all)
        start = 0
        while start < occupied.size:
            base = int(cum[start - 1]) if start else 0
            end = int(np.searchsorted(cum, base + chunk_nodes, side="right"))
            end = min(max(end, start + 1), occupied.size)
            rows = occupied[start:end]
            _, offsets, ys, wts = _flat_rows(
                rule, plan.n2[rows], plan.row_lower[rows],
                plan.row_upper[rows])
            xs = np.repeat(plan.outer_nodes[rows],
                           np.diff(offsets).astype(np.int64))
            vals = np.asarray(g(xs, ys), dtype=float)
            finite = np.isfinite(vals)
            if not finite.all():
                bad = int(np.argmin(finite))
                raise NonFiniteValueError(
                    f"integrand not finite at node"
                    f" (x={float(xs[bad])!r}, y={float(ys[bad])!r})",
                    point=(float(xs[bad]), float(ys[bad])))
            nodes_evaluated += ys.size
            if compensated:
                products = np.multiply(wts, vals)
                sums = [math.fsum(products[offsets[r]:offsets[r + 1]])
                        for r in range(rows.size)]
            else:
                sums = np.empty(rows.size)
                kernels.row_weighted_sums(wts, vals, offsets, sums)
            for j, i in enumerate(rows):
                term = plan.outer_weights[i] * (plan.k_star[i] * float(sums[j]))
                if compensated:
                    outer_terms.append(term)
                else:
                    outer_acc += term
            start = end

    if compensated:
        outer_acc = math.fsum(outer_terms)
    value = plan.h_star * outer_acc
    bound = roundoff_bound(plan.extent, plan.max_breadth, mu)
    return CubatureValue(value=float(value), nodes_evaluated=nodes_evaluated,
                         roundoff_bound=bound)
