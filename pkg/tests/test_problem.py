import numpy as np
import pytest

import relcube as rc
from relcube import bounds
from relcube.problem import eval_g, vectorized_1d, vectorized_2d

from conftest import EX1_M


def test_ex1_transform_parameters(ex1_normalized):
    prob = ex1_normalized
    assert prob.m1 == 1.0
    assert prob.m2 == pytest.approx(7.0 / 5.0, rel=1e-14)
    assert prob.l1 == pytest.approx(0.2, rel=1e-14)
    assert prob.u1 == pytest.approx(1.6, rel=1e-14)


def test_ex1_auto_scale(ex1_normalized):
    # M = (7/5)e^{12.8} = 5.07104e5, attained at the (1,1) corner.
    assert ex1_normalized.big_m == pytest.approx(5.07104e5, rel=1e-3)
    assert ex1_normalized.big_m == pytest.approx(EX1_M, rel=1e-9)


def test_ex2_auto_scale(ex2_normalized):
    assert ex2_normalized.big_m == pytest.approx(93.0 / 5.0, rel=1e-3)


def test_already_normalized_problem():
    region = rc.Region(a=0.0, b=1.0, lower=lambda x: 0.0 * x,
                       upper=lambda x: 1.0 + 0.0 * x)
    integrand = rc.Integrand(eval=lambda x, y: 0.5 * np.ones_like(x * y))
    prob = rc.normalize(region, integrand)
    assert prob.m1 == 1.0 and prob.m2 == 1.0
    assert prob.big_m == 1.0
    assert eval_g(prob, 0.3, 0.8) == 0.5
    assert eval_g(prob, 0.0, 1.0) == 0.5


def test_ex2_g_at_origin(ex2_normalized):
    # g(0,0) = sin((3*0+1)(31*0+1)) = sin(1); the scale 93/5 cancels.
    assert eval_g(ex2_normalized, 0.0, 0.0) == pytest.approx(np.sin(1.0),
                                                             rel=1e-3)


def test_ex1_g_attains_one_at_corner(ex1_normalized):
    assert abs(eval_g(ex1_normalized, 1.0, 1.0)) == pytest.approx(1.0,
                                                                  abs=1e-9)


def test_scaling_identity(ex1_normalized):
    # M*g must reproduce G~*m1*m2 to a few ulps at random points of the region.
    prob = ex1_normalized
    rng = np.random.default_rng(7)
    w = rng.uniform(0.0, 1.0, size=10_000)
    t = rng.uniform(0.0, 1.0, size=10_000)
    lo = prob.l_tilde(w)
    z = lo + t * (prob.u_tilde(w) - lo)
    x = prob.m1 * w + prob.region.a
    y = prob.m2 * z + prob.l1
    direct = prob.integrand.eval(x, y) * prob.m1 * prob.m2
    scaled = prob.big_m * prob.g(w, z)
    assert np.max(np.abs(scaled - direct)) <= 8e-16 * prob.big_m


@pytest.mark.parametrize("fixture", ["ex1_normalized", "ex2_normalized"])
def test_g_bounded_by_one_on_grid(fixture, request):
    prob = request.getfixturevalue(fixture)
    w = np.linspace(0.0, 1.0, 201)[:, None]
    t = np.linspace(0.0, 1.0, 201)[None, :]
    lo = prob.l_tilde(w)
    z = lo + t * (prob.u_tilde(w) - lo)
    vals = np.abs(prob.g(np.broadcast_to(w, z.shape), z))
    assert vals.max() <= 1.0 + 1e-12
    assert vals.max() >= 1.0 / 1.1  # the scale is tight, not padded


@pytest.mark.parametrize("fixture", ["ex1_normalized", "ex2_normalized"])
def test_tilde_limits_span_unit_interval(fixture, request):
    # The refined grid extremes of the transformed limits are exactly 0 and 1.
    prob = request.getfixturevalue(fixture)
    cfg = bounds.SamplingConfig()
    top = bounds.refine_extremum_1d(prob.u_tilde, 0.0, 1.0, cfg, mode="max")
    bottom = bounds.refine_extremum_1d(prob.l_tilde, 0.0, 1.0, cfg, mode="min")
    assert top == pytest.approx(1.0, abs=1e-12)
    assert bottom == pytest.approx(0.0, abs=1e-12)


def test_tilde_limits_inside_unit_square(ex1_normalized, ex2_normalized):
    w = np.linspace(0.0, 1.0, 501)
    for prob in (ex1_normalized, ex2_normalized):
        lo = prob.l_tilde(w)
        hi = prob.u_tilde(w)
        assert np.all(lo >= -1e-12) and np.all(hi <= 1.0 + 1e-12)
        assert np.all(lo <= hi + 1e-12)


def test_crossing_limits_rejected():
    region = rc.Region(a=0.0, b=1.0, lower=lambda x: 1.0 - x,
                       upper=lambda x: x)
    integrand = rc.Integrand(eval=lambda x, y: x + y)
    with pytest.raises(rc.CrossingLimitsError, match="crossing limits"):
        rc.normalize(region, integrand)


def test_non_finite_integrand_rejected():
    region = rc.Region(a=0.0, b=1.0, lower=lambda x: 0.0 * x,
                       upper=lambda x: np.ones_like(x))
    integrand = rc.Integrand(eval=lambda x, y: 1.0 / (x - 0.5))
    with np.errstate(divide="ignore"), \
            pytest.raises(rc.NonFiniteValueError):
        rc.normalize(region, integrand)


def test_inverted_interval_rejected():
    with pytest.raises(ValueError, match="a < b"):
        rc.Region(a=2.0, b=1.0, lower=lambda x: 0.0, upper=lambda x: 1.0)


def test_zero_breadth_region_gives_zero_integrand():
    region = rc.Region(a=0.0, b=1.0, lower=lambda x: 0.5 + 0.0 * x,
                       upper=lambda x: 0.5 + 0.0 * x)
    integrand = rc.Integrand(eval=lambda x, y: x + y)
    prob = rc.normalize(region, integrand)
    assert prob.m2 == 0.0
    assert prob.big_m == 1.0
    assert eval_g(prob, 0.5, 0.5) == 0.0


def test_m_override_used_verbatim():
    region = rc.Region(a=0.0, b=1.0, lower=lambda x: 0.0 * x,
                       upper=lambda x: np.ones_like(x))
    integrand = rc.Integrand(eval=lambda x, y: np.exp(x * y),
                             analytic_bounds=rc.BoundOverrides(m=123.5))
    prob = rc.normalize(region, integrand)
    assert prob.big_m == 123.5


def test_scalar_only_callables_supported():
    import math
    region = rc.Region(a=1.0, b=2.0, lower=lambda x: x**2 / 5.0,
                       upper=lambda x: x**3 / 5.0)
    integrand = rc.Integrand(eval=lambda x, y: math.exp(4.0 * x * y))
    prob = rc.normalize(region, integrand, bounds.SamplingConfig(
        grid_points_per_axis=41, refine_rounds=1))
    assert prob.big_m == pytest.approx(EX1_M, rel=1e-2)


def test_vectorized_adapters_match_scalar_paths():
    f1 = vectorized_1d(lambda x: x**2)
    assert f1(3.0) == 9.0
    assert np.array_equal(f1(np.array([1.0, 2.0])), [1.0, 4.0])

    f2 = vectorized_2d(lambda x, y: x - y)
    assert f2(5.0, 3.0) == 2.0
    assert np.array_equal(f2(np.array([5.0, 6.0]), 3.0), [2.0, 3.0])

    const = vectorized_2d(lambda x, y: 0.25)
    assert np.array_equal(const(np.array([1.0, 2.0]), np.array([0.0, 0.0])),
                          [0.25, 0.25])


def test_eval_g_matches_direct_composition(ex2_normalized):
    prob = ex2_normalized
    w, z = 0.37, 0.21
    x, y = prob.to_original(w, z)
    expected = np.sin(x * y) / 5.0 * prob.m1 * prob.m2 / prob.big_m
    assert eval_g(prob, w, z) == pytest.approx(expected, rel=1e-14)
