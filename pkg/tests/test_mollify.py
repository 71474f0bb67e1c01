import math

import mpmath
import numpy as np
import pytest

from hypwp import bump_kernel, mollify, verify_mollifier_bounds
from hypwp.errors import DomainError
from hypwp.mollify import const, mollified_derivative, mollified_value, power

mpmath.mp.dps = 30


def _bump_mass():
    return mpmath.quad(lambda u: mpmath.exp(-1 / (1 - u * u)), [-1, 0, 1])


def test_kernel_has_unit_mass():
    k = bump_kernel()
    assert k.mass() == pytest.approx(1.0, abs=1e-13)
    assert k.norm == pytest.approx(float(1 / _bump_mass()), rel=1e-12)


def test_value_at_kink_two_orders_agree_and_match_oracle():
    a = power(1.0, 0.5, 0.5)
    k = bump_kernel()
    v64 = mollified_value(a, k, 1e-2, 0.5, order=64)
    v128 = mollified_value(a, k, 1e-2, 0.5, order=128)
    assert abs(v64 - v128) < 1e-8
    # int |eps u|^(1/2) psi(u) du, symmetric about the kink
    eps = mpmath.mpf("0.01")
    oracle = 2 * mpmath.quad(lambda u: mpmath.sqrt(eps * u) * mpmath.exp(-1 / (1 - u * u)), [0, 1]) / _bump_mass()
    assert v64 == pytest.approx(float(oracle), rel=1e-10)


def test_constant_is_preserved():
    a = const(3.0)
    assert mollify(a, eps=0.05)(0.3) == pytest.approx(3.0, abs=1e-13)


def test_linear_coefficient_unchanged_in_interior():
    a = power(1.0, 1.0, 0.0)
    for t in (0.2, 0.5, 0.8):
        assert mollified_value(a, bump_kernel(), 0.01, t) == pytest.approx(t, abs=1e-13)


def test_lipschitz_derivative_bound():
    a = power(1.0, 1.0, 0.0)
    rep = verify_mollifier_bounds(a, None, [2.0 ** -j for j in range(4, 9)], np.linspace(0.25, 0.75, 11))
    assert rep.R1.max() <= 1 + 1e-6
    assert rep.R2.max() < 1e-12


def test_hoelder_bounds_have_no_trend():
    a = power(1.0, 0.5, 0.5)
    rep = verify_mollifier_bounds(a, None, [2.0 ** -j for j in range(4, 12)], np.linspace(0.25, 0.75, 21))
    assert rep.passed
    assert abs(rep.slope1) < 0.1 and abs(rep.slope2) < 0.1


def test_derivative_matches_derivative_kernel():
    # d/dt int a(t - eps u) psi(u) du = (1/eps) int a(t - eps u) psi'(u) du
    a = power(1.0, 0.5, 0.5)
    k = bump_kernel()
    eps, t = 0.02, 0.51
    direct = mollified_value(a, k, eps, t, order=128, weight=k.derivative) / eps
    assert mollified_derivative(a, k, eps, t, order=128) == pytest.approx(direct, rel=1e-6)


def test_bad_scale_rejected():
    with pytest.raises(DomainError):
        mollify(const(1.0), eps=0.9)
