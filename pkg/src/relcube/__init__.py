"""Bivariate cubature with relative error control.

Evaluates integrals of G(x, y) over regions a <= x <= b, l(x) <= y <= u(x)
by composite positive-weight interpolatory cubature.  The problem is mapped
onto the unit square and rescaled so the transformed integral has magnitude
at most 1; absolute error control on that problem then yields either a
relative-error estimate (when the integral's magnitude exceeds 1) or an
absolute bound (otherwise), without any prior knowledge of the integral's
size.  See README.md for the CLI and the file formats.
"""

from .bounds import BoundSet, SamplingConfig
from .controller import (ControlConfig, CubatureReport, Target, refine_until,
                         run_once)
from .engine import (CubatureValue, GridPlan, evaluate, plan_grid,
                     roundoff_bound, select_stepsize)
from .errors import (CrossingLimitsError, NonFiniteValueError, RelcubeError,
                     StencilFitError, ToleranceFloorError, UnknownRuleError)
from .oracle import OracleResult, reference_integral
from .problem import (BoundOverrides, Integrand, NormalizedProblem, Region,
                      eval_g, normalize)
from .rules import RuleSpec, composite_expansion, get_rule, rule_names

__version__ = "0.1.0"

__all__ = [
    "BoundOverrides", "BoundSet", "ControlConfig", "CrossingLimitsError",
    "CubatureReport", "CubatureValue", "GridPlan", "Integrand",
    "NonFiniteValueError", "NormalizedProblem", "OracleResult", "Region",
    "RelcubeError", "RuleSpec", "SamplingConfig", "StencilFitError",
    "Target", "ToleranceFloorError", "UnknownRuleError",
    "composite_expansion", "eval_g", "evaluate", "get_rule", "normalize",
    "plan_grid", "reference_integral", "refine_until", "roundoff_bound",
    "rule_names", "run_once", "select_stepsize",
]
