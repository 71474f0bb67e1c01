import math

import mpmath
import numpy as np
import pytest

from hypwp import ShapeFunction, check_shape_conditions
from hypwp.errors import DomainError
from hypwp.shape import shape_ratio

mpmath.mp.dps = 30


def test_flat_profile_value_matches_high_precision():
    sh = ShapeFunction.exponential_flat(1.0)
    assert sh.lam(0.5) == pytest.approx(float(mpmath.exp(-2)), rel=1e-14)
    assert sh.lam(0.5) == pytest.approx(0.135335, abs=1e-6)


@pytest.mark.parametrize("t", [0.02, 0.1, 0.5, 1.0])
def test_flat_primitive_matches_incomplete_gamma(t):
    # int_0^t exp(-1/r) dr = Gamma(-1, 1/t) after r = 1/y
    sh = ShapeFunction.exponential_flat(1.0)
    oracle = float(mpmath.gammainc(-1, 1 / mpmath.mpf(t)))
    assert sh.Lam(t) == pytest.approx(oracle, rel=1e-10)


def test_flat_primitive_two_quadratures_agree():
    sh = ShapeFunction.exponential_flat(1.0)
    quad = float(mpmath.quad(lambda r: mpmath.exp(-1 / r), [0, 0.25, 0.5]))
    assert abs(sh.Lam(0.5) - quad) <= 1e-10 * quad


@pytest.mark.parametrize("l", [1, 2, 4, 7.5])
def test_monomial_primitive_closed_form(l):
    sh = ShapeFunction.monomial(l)
    for t in (1e-6, 1e-2, 0.3, 1.0):
        assert sh.Lam(t) == pytest.approx(t ** (l + 1) / (l + 1), rel=1e-12)
        assert shape_ratio(sh, t) == pytest.approx(l / (l + 1), rel=1e-12)


def test_quartic_shape_condition_passes():
    rep = check_shape_conditions(ShapeFunction.monomial(4), 3.0, 2)
    assert rep.c0 == pytest.approx(0.8, abs=1e-12)
    assert rep.c == pytest.approx(0.8, abs=1e-12)
    assert rep.threshold == pytest.approx(0.75)
    assert rep.passed


def test_linear_shape_condition_fails():
    rep = check_shape_conditions(ShapeFunction.monomial(1), 3.0, 2)
    assert rep.c0 == pytest.approx(0.5, abs=1e-12)
    assert not rep.passed


def test_flat_profile_constants_finite():
    # on T = 1 the ratio t^-2 Lambda/lambda reaches its minimum at t = 1
    sh = ShapeFunction.exponential_flat(1.0)
    rep = check_shape_conditions(sh, 3.0, 2, np.geomspace(0.05, 1.0, 100))
    oracle = float(mpmath.gammainc(-1, 1) * mpmath.e)
    assert math.isfinite(rep.c) and rep.c < 1
    assert rep.c0 == pytest.approx(oracle, rel=1e-9)
    assert not rep.passed


def test_flat_profile_short_interval_passes():
    sh = ShapeFunction.exponential_flat(1.0, T=0.1)
    rep = check_shape_conditions(sh, 3.0, 2, np.geomspace(0.005, 0.1, 100))
    assert rep.passed


def test_grid_outside_interval_rejected():
    with pytest.raises(DomainError):
        check_shape_conditions(ShapeFunction.monomial(4), 3.0, 2, [0.5, 1.5])


def test_round_trip_dict():
    for sh in (ShapeFunction.monomial(4, T=2.0), ShapeFunction.exponential_flat(1.5)):
        assert ShapeFunction.from_dict(sh.to_dict()).to_dict() == sh.to_dict()
