import math

import mpmath
import numpy as np
import pytest

from hypwp import Modulus, WeightSequence, check_sequence_inequality
from hypwp.errors import DomainError, SpecError
from hypwp.moduli import check_modulus, log_inf_ratio

mpmath.mp.dps = 30


@pytest.mark.parametrize("x", [2.0, 1e3, 1e12])
def test_lipschitz_weight_is_one(x):
    assert Modulus("lipschitz").phi(x) == 1.0


def test_hoelder_weight():
    assert Modulus("hoelder", alpha=0.5).phi(1e4) == pytest.approx(100.0, rel=1e-14)


def test_loginverse_weight_value():
    x = math.exp(10)
    oracle = mpmath.e ** 10 / mpmath.mpf(11) ** 2
    assert Modulus("loginverse", alpha=2).phi(x) == pytest.approx(float(oracle), rel=1e-12)
    assert float(oracle) == pytest.approx(182.0369, abs=1e-4)


@pytest.mark.parametrize("mu", [
    Modulus("lipschitz"), Modulus("hoelder", alpha=0.3), Modulus("loglip", power=2.0),
    Modulus("loginverse", alpha=0.5), Modulus("logloglip", depth=1), Modulus("logloglip", depth=2),
])
def test_phi_is_x_times_mu_of_reciprocal(mu):
    for x in (10.0, 1e4, 1e9):
        assert mu.phi(x) == pytest.approx(x * mu.mu(1 / x), rel=1e-12)


@pytest.mark.parametrize("mu", [
    Modulus("lipschitz"), Modulus("hoelder", alpha=0.5), Modulus("loglip", power=1.0),
    Modulus("loglip", power=2.0), Modulus("loginverse", alpha=2.0), Modulus("logloglip", depth=1),
])
def test_moduli_are_concave_increasing_subadditive(mu):
    assert check_modulus(mu, n=200).passed


def test_modulus_interval_ends():
    assert Modulus("loglip", power=2.0).s0 == pytest.approx(math.exp(-1))
    assert Modulus("loginverse", alpha=2.0).s0 == pytest.approx(math.exp(-2))
    assert Modulus("lipschitz").s0 == 1.0


def test_table_forms_track_closed_forms():
    for mu in (Modulus("loglip", power=2.0), Modulus("loginverse", alpha=1.0)):
        r = [mu.phi(x) / mu.table_phi(x) for x in (1e20, 1e80)]
        assert abs(r[1] - 1) < abs(r[0] - 1)


def test_invalid_moduli():
    with pytest.raises(DomainError):
        Modulus("hoelder", alpha=1.0)
    with pytest.raises(DomainError):
        Modulus("wiggly")
    with pytest.raises(SpecError):
        Modulus.from_dict({"kind": "hoelder"})


def test_gevrey_sequence_log_values():
    ws = WeightSequence("gevrey", s_star=2.0, A=1.0, P_max=50)
    p = np.arange(6)
    assert ws.log_K(p) == pytest.approx([2 * math.lgamma(k + 1) for k in p], abs=1e-12)


def test_inf_ratio_argmin_near_root():
    # (p!)^2 x^-p is smallest near p = sqrt(x)
    ws = WeightSequence("gevrey", s_star=2.0, P_max=5000)
    v, p = log_inf_ratio(ws, 1e4)
    assert abs(p - 100) <= 1
    # Stirling: log inf ~ -2 sqrt(x) + log(2 pi sqrt(x))
    assert v == pytest.approx(-200 + math.log(2 * math.pi * 100), abs=0.05)


def test_sequence_inequality_holds_for_square_root():
    ws = WeightSequence("gevrey", s_star=2.0, A=1.0, P_max=4000)
    rep = check_sequence_inequality(ws, math.sqrt, 0.5, np.geomspace(1e2, 1e6, 21))
    assert rep.passed and not rep.inconclusive


def test_sequence_inequality_fails_for_linear_weight():
    ws = WeightSequence("gevrey", s_star=2.0, A=1.0, P_max=4000)
    rep = check_sequence_inequality(ws, lambda x: x, 1.0, np.geomspace(1e2, 1e6, 21))
    assert not rep.passed
    assert rep.slack[-1] > rep.slack[0]


def test_sequence_inequality_inconclusive_when_truncated():
    ws = WeightSequence("gevrey", s_star=2.0, A=1.0, P_max=50)
    rep = check_sequence_inequality(ws, math.sqrt, 0.5, np.geomspace(1e2, 1e6, 9))
    assert rep.inconclusive and not rep.passed
