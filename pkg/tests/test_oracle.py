import numpy as np
import pytest

import relcube as rc


def test_constant_on_unit_square():
    region = rc.Region(a=0.0, b=1.0, lower=lambda x: 0.0 * x,
                       upper=lambda x: np.ones_like(np.asarray(x, float)))
    integrand = rc.Integrand(eval=lambda x, y: 0.7 * np.ones_like(x * y))
    res = rc.reference_integral(region, integrand, rel_target=1e-13)
    assert res.converged
    assert res.value == pytest.approx(0.7, rel=1e-14)


def test_separable_polynomial():
    # inner integral of x*y^2 over [0, x] is x^4/3; over x in [0,1]: 1/15
    region = rc.Region(a=0.0, b=1.0, lower=lambda x: 0.0 * x,
                       upper=lambda x: np.asarray(x, float))
    integrand = rc.Integrand(eval=lambda x, y: x * y**2)
    res = rc.reference_integral(region, integrand, rel_target=1e-12)
    assert res.value == pytest.approx(1.0 / 15.0, rel=1e-12)


@pytest.mark.slow
def test_problem_one_reference(ex1_oracle):
    assert ex1_oracle.converged
    assert ex1_oracle.value == pytest.approx(1.92660e3, rel=1e-5)


def test_problem_two_reference(ex2_oracle):
    assert ex2_oracle.converged
    assert ex2_oracle.value == pytest.approx(-0.00734, rel=1e-3)


def test_resolution_sequence_increasing(ex2_oracle):
    ns = [n for n, _ in ex2_oracle.resolution_sequence]
    assert ns == sorted(ns)
    assert all(b == 2 * a for a, b in zip(ns, ns[1:]))


def test_self_consistency(ex2_oracle):
    # last two levels agree within the requested tolerance
    (_, prev), (_, last) = ex2_oracle.resolution_sequence[-2:]
    assert abs(last - prev) <= 1e-9 * abs(last)


def test_rel_target_validation(ex2):
    region, integrand = ex2
    with pytest.raises(ValueError):
        rc.reference_integral(region, integrand, rel_target=1e-14)


def test_non_finite_integrand_named():
    region = rc.Region(a=0.0, b=1.0, lower=lambda x: 0.0 * x,
                       upper=lambda x: np.ones_like(np.asarray(x, float)))
    integrand = rc.Integrand(eval=lambda x, y: np.where(x > 0.9, np.nan, 1.0))
    with pytest.raises(rc.NonFiniteValueError):
        rc.reference_integral(region, integrand, rel_target=1e-10)


@pytest.mark.slow
def test_oracle_engine_agreement(ex1_first_pass, ex1_oracle):
    # the controller's own error estimate brackets the oracle disagreement
    rel_err = abs(ex1_first_pass.value - ex1_oracle.value) / abs(ex1_oracle.value)
    assert rel_err <= ex1_first_pass.rel_estimate
