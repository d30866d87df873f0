"""Shared fixtures: the two reproduction problems and their reference values."""

import numpy as np
import pytest

import relcube as rc

# Worked problem 1: steep exponential, relative error control.
#   integral of exp(4xy) over 1<=x<=2, x^2/5 <= y <= x^3/5  ~= 1.92660e3
# Worked problem 2: oscillatory, magnitude below 1, absolute control.
#   integral of sin(xy)/5 over 1<=x<=4, x <= y <= 2x^2      ~= -0.00734
#
# Reference bound values for problem 1 (the published arithmetic):
#   M  = (7/5)e^{12.8}  = 5.07104e5      D  = 18/26
#   Sx = (4*(8/5))^4    = 1.67772e3      Sy = (4*2*(7/5))^4 = 1.57351e4
EX1_M = 1.4 * np.exp(12.8)
EX1_D = 18.0 / 26.0
EX1_SX = (4.0 * 8.0 / 5.0) ** 4
EX1_SY = (4.0 * 2.0 * 7.0 / 5.0) ** 4


def ex1_region():
    return rc.Region(a=1.0, b=2.0, lower=lambda x: x**2 / 5.0,
                     upper=lambda x: x**3 / 5.0)


def ex1_integrand(with_bounds=False):
    overrides = None
    if with_bounds:
        overrides = rc.BoundOverrides(m=EX1_M, d=EX1_D, deriv_sup_x=EX1_SX,
                                      deriv_sup_y=EX1_SY)
    return rc.Integrand(eval=lambda x, y: np.exp(4.0 * x * y),
                        analytic_bounds=overrides)


def ex2_region():
    return rc.Region(a=1.0, b=4.0, lower=lambda x: x,
                     upper=lambda x: 2.0 * x**2)


def ex2_integrand():
    return rc.Integrand(eval=lambda x, y: np.sin(x * y) / 5.0)


@pytest.fixture(scope="session")
def ex1():
    return ex1_region(), ex1_integrand()


@pytest.fixture(scope="session")
def ex1_bounded():
    return ex1_region(), ex1_integrand(with_bounds=True)


@pytest.fixture(scope="session")
def ex2():
    return ex2_region(), ex2_integrand()


@pytest.fixture(scope="session")
def ex1_normalized(ex1):
    region, integrand = ex1
    return rc.normalize(region, integrand)


@pytest.fixture(scope="session")
def ex2_normalized(ex2):
    region, integrand = ex2
    return rc.normalize(region, integrand)


@pytest.fixture(scope="session")
def ex1_oracle(ex1):
    region, integrand = ex1
    return rc.reference_integral(region, integrand, rel_target=1e-12)


@pytest.fixture(scope="session")
def ex2_oracle(ex2):
    region, integrand = ex2
    return rc.reference_integral(region, integrand, rel_target=1e-9)


@pytest.fixture(scope="session")
def ex1_first_pass(ex1_bounded):
    """Single pipeline pass on problem 1 with the published bound set."""
    region, integrand = ex1_bounded
    cfg = rc.ControlConfig(eps=1e-10, mu=1e-16, rule_name="simpson")
    return rc.run_once(region, integrand, cfg)


@pytest.fixture(scope="session")
def ex1_refined(ex1_bounded):
    """Refined run on problem 1, targeting relative error 1e-10."""
    region, integrand = ex1_bounded
    cfg = rc.ControlConfig(eps=1e-10, mu=1e-16, rule_name="simpson",
                           target=rc.Target(kind="relative", value=1e-10))
    return rc.refine_until(region, integrand, cfg)


@pytest.fixture(scope="session")
def ex2_run_1em4(ex2):
    region, integrand = ex2
    cfg = rc.ControlConfig(eps=1e-4, mu=1e-16, rule_name="simpson")
    return rc.run_once(region, integrand, cfg)
