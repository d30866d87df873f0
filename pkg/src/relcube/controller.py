"""Driver: normalize, bound, plan, evaluate, report, and refine.

The pipeline runs absolute error control on the scaled problem (whose
integral has magnitude at most 1) and translates the outcome back:

    value        = M * Qc[g]          (the answer)
    abs_bound    = M * eps            (absolute-error bound)
    rel_estimate = eps / |Qc[g]|      (estimated relative-error bound)

The report is in relative mode when |value| > 1, absolute otherwise.  When
an estimate misses the caller's target by a factor eta, the run repeats
with tolerance eps/eta; absolute targets need no repetition since M is
already known, so eps is set directly to target/M less a small margin.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from . import bounds, engine, rules
from .errors import ToleranceFloorError
from .problem import BoundOverrides, normalize

__all__ = ["Target", "ControlConfig", "CubatureReport", "run_once",
           "refine_until"]

# Margin shaved off eps for absolute targets so M*eps lands strictly below
# the requested bound.
_ABS_TARGET_MARGIN = 1e-3


@dataclass(frozen=True)
class Target:
    """Requested error bound: kind is 'absolute' or 'relative'."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("absolute", "relative"):
            raise ValueError(f"target kind must be absolute|relative,"
                             f" got {self.kind!r}")
        if not self.value > 0:
            raise ValueError("target value must be positive")


@dataclass(frozen=True)
class ControlConfig:
    """Everything run_once/refine_until need besides the problem itself."""

    eps: Optional[float] = None
    mu: float = bounds.MU_DEFAULT
    rule_name: str = "simpson"
    target: Optional[Target] = None
    max_refinements: int = 5
    sampling: bounds.SamplingConfig = field(default_factory=bounds.SamplingConfig)
    bound_overrides: Optional[BoundOverrides] = None
    compensated: bool = False


@dataclass
class CubatureReport:
    """Result of one controlled cubature run (possibly after refinement)."""

    value: float
    mode: str                 # "relative" or "absolute"
    abs_bound: float          # M * eps
    rel_estimate: float       # eps / |Qc[g]|, may be inf
    qc_g: float
    big_m: float
    eps: float                # tolerance of the final pass
    mu: float
    rule_name: str
    n1: int
    nodes_evaluated: int
    h: float
    h_star: float
    max_k_star: float
    bound_set: bounds.BoundSet
    roundoff_floor: float
    converged: bool = True
    warnings: list = field(default_factory=list)
    refinement_history: list = field(default_factory=list)

    def as_dict(self):
        """Flat dict with stable field names for serialization."""
        return {
            "value": self.value,
            "mode": self.mode,
            "abs_bound": self.abs_bound,
            "rel_estimate": self.rel_estimate,
            "qc_g": self.qc_g,
            "big_m": self.big_m,
            "eps": self.eps,
            "mu": self.mu,
            "rule": self.rule_name,
            "n1": self.n1,
            "nodes_evaluated": self.nodes_evaluated,
            "h": self.h,
            "h_star": self.h_star,
            "max_k_star": self.max_k_star,
            "bounds": {
                "d": self.bound_set.d,
                "deriv_sup_x": self.bound_set.deriv_sup_x,
                "deriv_sup_y": self.bound_set.deriv_sup_y,
                "provenance": self.bound_set.provenance,
            },
            "roundoff_floor": self.roundoff_floor,
            "converged": self.converged,
            "warnings": list(self.warnings),
            "refinement_history": [
                {"eps": e, "rel_estimate": r, "abs_bound": a}
                for (e, r, a) in self.refinement_history
            ],
        }


def _with_overrides(integrand, cfg):
    if cfg.bound_overrides is None:
        return integrand
    merged = cfg.bound_overrides.merged_over(integrand.analytic_bounds)
    return replace(integrand, analytic_bounds=merged)


def _prepare(region, integrand, cfg):
    """Normalize and estimate bounds once; both are tolerance-independent."""
    integrand = _with_overrides(integrand, cfg)
    rule = rules.get_rule(cfg.rule_name)
    prob = normalize(region, integrand, cfg.sampling)
    bound_set = bounds.estimate_bound_set(prob, rule.order_r, cfg.sampling)
    return prob, rule, bound_set


def _single_pass(prob, rule, bound_set, eps, cfg):
    h = engine.select_stepsize(eps, cfg.mu, rule, 1.0, bound_set)
    plan = engine.plan_grid(h, prob.normalized_region, rule)
    result = engine.evaluate(prob.g, plan, mu=cfg.mu,
                             compensated=cfg.compensated)
    return h, plan, result


def _assemble(prob, rule, bound_set, eps, cfg, h, plan, result,
              history, converged, warnings):
    qc_g = result.value
    value = prob.big_m * qc_g
    abs_bound = prob.big_m * eps
    rel_estimate = eps / abs(qc_g) if qc_g != 0.0 else math.inf
    mode = "relative" if abs(value) > 1.0 else "absolute"
    return CubatureReport(
        value=value,
        mode=mode,
        abs_bound=abs_bound,
        rel_estimate=rel_estimate,
        qc_g=qc_g,
        big_m=prob.big_m,
        eps=eps,
        mu=cfg.mu,
        rule_name=rule.name,
        n1=plan.n1,
        nodes_evaluated=result.nodes_evaluated,
        h=h,
        h_star=plan.h_star,
        max_k_star=plan.max_k_star,
        bound_set=bound_set,
        roundoff_floor=engine.roundoff_bound(1.0, bound_set.d, cfg.mu),
        converged=converged,
        warnings=warnings,
        refinement_history=history,
    )


def run_once(region, integrand, cfg):
    """One pass of the pipeline at cfg.eps; no refinement."""
    if cfg.eps is None:
        raise ValueError("run_once needs cfg.eps; set it or use refine_until"
                         " with a target")
    prob, rule, bound_set = _prepare(region, integrand, cfg)
    h, plan, result = _single_pass(prob, rule, bound_set, cfg.eps, cfg)
    report = _assemble(prob, rule, bound_set, cfg.eps, cfg, h, plan, result,
                       history=[], converged=True, warnings=[])
    report.refinement_history.append(
        (cfg.eps, report.rel_estimate, report.abs_bound))
    _warn_on_mode(report, cfg)
    return report


def _warn_on_mode(report, cfg):
    if (cfg.target is not None and cfg.target.kind == "relative"
            and abs(report.value) < 1.0):
        report.warnings.append(
            "integral magnitude is below 1: the relative-error estimate can"
            " be much larger than the tolerance; the absolute bound"
            f" {report.abs_bound:g} is the meaningful one here")


def refine_until(region, integrand, cfg):
    """Repeat the pipeline until the target is met or the budget runs out.

    Relative targets: start at cfg.eps (default: the target itself) and
    divide eps by eta = ceil(estimate/target) whenever the estimate misses.
    Absolute targets: a single pass at eps = target/M (less a one-per-mil
    margin), since the bound M*eps is known before any cubature is run.
    Returns the last report, with ``converged`` False when the refinement
    budget was exhausted before the target was met.
    """
    if cfg.target is None:
        return run_once(region, integrand, cfg)

    prob, rule, bound_set = _prepare(region, integrand, cfg)
    target = cfg.target
    floor = engine.roundoff_bound(1.0, bound_set.d, cfg.mu)

    if target.kind == "absolute":
        eps = (target.value / prob.big_m) * (1.0 - _ABS_TARGET_MARGIN)
    else:
        eps = cfg.eps if cfg.eps is not None else target.value

    history = []
    warnings = []
    attempts = cfg.max_refinements + 1
    for attempt in range(attempts):
        h, plan, result = _single_pass(prob, rule, bound_set, eps, cfg)
        qc_g = result.value
        rel_estimate = eps / abs(qc_g) if qc_g != 0.0 else math.inf
        abs_bound = prob.big_m * eps
        history.append((eps, rel_estimate, abs_bound))

        governing = abs_bound if target.kind == "absolute" else rel_estimate
        if governing <= target.value:
            report = _assemble(prob, rule, bound_set, eps, cfg, h, plan,
                               result, history, True, warnings)
            _warn_on_mode(report, cfg)
            return report
        if attempt == attempts - 1:
            break
        if not math.isfinite(governing):
            warnings.append("cubature of the scaled integrand is zero; the"
                            " relative-error estimate is unbounded")
            break
        eta = math.ceil(governing / target.value)
        eps = eps / eta
        if not eps > floor:
            raise ToleranceFloorError(
                f"refinement drove the tolerance to {eps:g}, at or below the"
                f" roundoff floor {floor:g}; the target {target.value:g}"
                " cannot be certified in this precision", floor=floor)

    report = _assemble(prob, rule, bound_set, eps, cfg, h, plan, result,
                       history, False, warnings)
    report.warnings.append(
        f"target {target.kind} bound {target.value:g} not reached after"
        f" {cfg.max_refinements} refinement(s)")
    _warn_on_mode(report, cfg)
    return report
