"""Registry of positive-weight composite interpolatory quadrature rules.

Each rule is described by its convergence order ``r``, the error constant
``A(r)`` appearing in the bound ``A(r)*(b-a)*h^r*max|f^(r)|``, and the node
positions/weights of a single panel on [0, 1].  Weights are *reduced*: the
absolute weight of a node in a panel of length ``k`` is ``k`` times its
reduced weight, so the reduced weights of one panel sum to 1.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UnknownRuleError

__all__ = ["RuleSpec", "get_rule", "rule_names", "composite_expansion",
           "composite_nodes", "reduced_pattern"]

_SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class RuleSpec:
    """One positive-weight interpolatory rule in reduced (per-panel) form."""

    name: str
    order_r: int
    err_const_A: float
    panel_nodes: tuple
    panel_weights: tuple

    @property
    def closed(self):
        """True when adjacent panels share their endpoint nodes."""
        return self.panel_nodes[0] == 0.0 and self.panel_nodes[-1] == 1.0

    @property
    def nodes_per_panel(self):
        return len(self.panel_nodes)


_RULES = {
    "trapezium": RuleSpec(
        name="trapezium",
        order_r=2,
        err_const_A=1.0 / 12.0,
        panel_nodes=(0.0, 1.0),
        panel_weights=(0.5, 0.5),
    ),
    # The Simpson constant 16/180 treats h as the panel length (two node
    # spacings), hence the 2^4 factor over the classical 1/180 per-spacing
    # form.  Conservative, and deliberately kept.
    "simpson": RuleSpec(
        name="simpson",
        order_r=4,
        err_const_A=16.0 / 180.0,
        panel_nodes=(0.0, 0.5, 1.0),
        panel_weights=(1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0),
    ),
    "gauss_legendre_2": RuleSpec(
        name="gauss_legendre_2",
        order_r=4,
        err_const_A=1.0 / 4320.0,
        panel_nodes=((1.0 - 1.0 / _SQRT3) / 2.0, (1.0 + 1.0 / _SQRT3) / 2.0),
        panel_weights=(0.5, 0.5),
    ),
}


def rule_names():
    """Names of all registered rules, sorted."""
    return sorted(_RULES)


def get_rule(name):
    """Look up a rule by name.

    Raises UnknownRuleError for anything not in the registry.
    """
    try:
        return _RULES[name]
    except KeyError:
        raise UnknownRuleError(
            f"unknown rule {name!r}; available rules: {', '.join(rule_names())}"
        ) from None


def reduced_pattern(rule, n_subintervals):
    """Reduced weights of the composite rule on ``n_subintervals`` panels.

    For closed rules shared endpoints are merged, so their weights add
    (composite Simpson's 1,4,2,...,4,1 over 6).  The pattern sums to
    ``n_subintervals``; multiplying by the panel length gives absolute
    weights summing to the interval length.
    """
    if n_subintervals < 1:
        raise ValueError("n_subintervals must be >= 1")
    m = rule.nodes_per_panel
    if rule.closed:
        total = n_subintervals * (m - 1) + 1
        pattern = np.zeros(total)
        for j, w in enumerate(rule.panel_weights):
            stop = j + (n_subintervals - 1) * (m - 1) + 1
            pattern[j:stop:m - 1] += w
    else:
        pattern = np.tile(rule.panel_weights, n_subintervals)
    return pattern


def composite_nodes(rule, n_subintervals, p, q):
    """Ascending node coordinates of the composite rule on [p, q]."""
    if n_subintervals < 1:
        raise ValueError("n_subintervals must be >= 1")
    if not p < q:
        raise ValueError(f"empty interval [{p}, {q}]")
    m = rule.nodes_per_panel
    if rule.closed:
        # Closed registered rules have equispaced panel nodes, so the merged
        # composite grid is uniform.
        return np.linspace(p, q, n_subintervals * (m - 1) + 1)
    k = (q - p) / n_subintervals
    offsets = np.asarray(rule.panel_nodes)
    starts = p + k * np.arange(n_subintervals)
    return (starts[:, None] + k * offsets[None, :]).ravel()


def composite_expansion(rule, n_subintervals, interval):
    """Nodes and absolute weights of the composite rule on ``interval``.

    The weights are strictly positive and sum to the interval length (up to
    roundoff).  Shared endpoints of adjacent panels appear once, with their
    panel weights merged.
    """
    p, q = interval
    nodes = composite_nodes(rule, n_subintervals, p, q)
    k = (q - p) / n_subintervals
    weights = k * reduced_pattern(rule, n_subintervals)
    return nodes, weights
