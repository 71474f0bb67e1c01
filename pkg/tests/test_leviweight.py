import math

import mpmath
import numpy as np
import pytest

from hypwp import LeviWeight, ShapeFunction, ZonePartition, check_decay_condition, levi_part, rho, t_xi, verify_weight_integrals
from hypwp import verify_rho_bounds
from hypwp.errors import DomainError
from hypwp.leviweight import drho_over_rho, log_rho, xi_from_bracket, zone_of

mpmath.mp.dps = 30
LOG_1E4 = math.log(1e-4)


def test_power_weight_at_known_level(gevrey_weight):
    # w^2 = Lambda^(-3/2) so w(1e-4) = 1e3
    assert math.exp(gevrey_weight.log_wm_ell(LOG_1E4) / 2) == pytest.approx(1e3, rel=1e-13)


def test_log_corrected_weight_value(quartic):
    lw = LeviWeight(2, 3.0, quartic, m_tilde=1, beta_tilde=2.0)
    oracle = mpmath.mpf(10) ** 6 * mpmath.log(mpmath.mpf(10) ** 4) ** 2
    assert math.exp(lw.log_wm_ell(LOG_1E4)) == pytest.approx(float(oracle), rel=1e-12)
    assert float(oracle) == pytest.approx(8.483e7, rel=1e-3)


def test_primitive_power_weight_closed_form(gevrey_weight):
    # W(Lambda) = Lambda^(1/4) / (1 - 3/4)
    for lam in (1e-12, 1e-4, 0.5):
        W = math.exp(gevrey_weight.log_W_ell(math.log(lam)))
        assert W * 0.25 / lam ** 0.25 == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("lam", [1e-4, 1e-12, 1e-40])
def test_primitive_log_weight_incomplete_gamma(quartic, lam):
    # int_0^Lambda L^(-3/4) log(1/L)^(1/2) dL = 4^(3/2) Gamma(3/2, log(1/Lambda)/4)
    lw = LeviWeight(2, 3.0, quartic, m_tilde=1, beta_tilde=1.0)
    U = -mpmath.log(mpmath.mpf(lam))
    oracle = 8 * mpmath.gammainc(1.5, U / 4)
    assert math.exp(lw.log_W_ell(math.log(lam))) == pytest.approx(float(oracle), rel=1e-10)


def test_primitive_log_weight_asymptotic_ratio_decreases_to_one(quartic):
    # W / (4 Lambda^(1/4) log(1/Lambda)^(1/2)) = 1 + 1/(2 log(1/Lambda)/4) + ...
    lw = LeviWeight(2, 3.0, quartic, m_tilde=1, beta_tilde=1.0)
    ratios = []
    for lam in (1e-4, 1e-12, 1e-40, 1e-120):
        ref = 4 * lam ** 0.25 * math.sqrt(-math.log(lam))
        ratios.append(math.exp(lw.log_W_ell(math.log(lam))) / ref)
    assert all(a > b > 1 for a, b in zip(ratios, ratios[1:]))
    assert ratios[0] == pytest.approx(1.186, abs=1e-3)
    assert ratios[-1] < 1.02


def test_zone_boundary_closed_form(gevrey_weight):
    tx = t_xi(gevrey_weight, ZonePartition(), 1e6)
    assert not tx.clamped
    assert math.exp(tx.log_Lambda) == pytest.approx(1e-4, rel=1e-12)
    assert tx.t == pytest.approx(5e-4 ** 0.2, rel=1e-12)
    assert tx.t == pytest.approx(0.21867, abs=1e-5)


@pytest.mark.parametrize("N", [0.5, 1.0, 3.0])
def test_zone_boundary_scaling(gevrey_weight, N):
    for x in np.geomspace(1e3, 1e12, 7):
        ell = t_xi(gevrey_weight, ZonePartition(N), x).log_Lambda
        assert math.exp(ell) * x ** (2 / 3) == pytest.approx(N ** (2 / 3), rel=1e-10)


def test_zone_boundary_clamps_at_low_frequency(gevrey_weight):
    tx = t_xi(gevrey_weight, ZonePartition(), 2.5)
    assert tx.clamped and tx.t == 1.0


def test_rho_value(gevrey_weight):
    t = 5e-4 ** 0.2
    lam = mpmath.mpf(t) ** 4
    Lam = mpmath.mpf(t) ** 5 / 5
    oracle = mpmath.sqrt(1 + mpmath.mpf(10) ** 6 * lam ** 2 * Lam ** mpmath.mpf(-1.5))
    assert rho(gevrey_weight, t, 1e6) == pytest.approx(float(oracle), rel=1e-12)


def test_rho_monotone_pair_and_derivative(gevrey_weight):
    assert rho(gevrey_weight, 0.4, 1e5) >= rho(gevrey_weight, 0.2, 1e5)
    for t in (0.05, 0.3, 0.9):
        h = t * 1e-6
        fd = (log_rho(gevrey_weight, t + h, 1e5) - log_rho(gevrey_weight, t - h, 1e5)) / (2 * h)
        assert drho_over_rho(gevrey_weight, t, 1e5) == pytest.approx(fd, rel=1e-6)


def test_rho_at_origin(gevrey_weight):
    assert rho(gevrey_weight, 0.0, 1e5) == 1.0
    bad = LeviWeight(2, 1.9, ShapeFunction.monomial(4))
    with pytest.raises(DomainError):
        log_rho(bad, 0.0, 1e5)


def test_zone_labels(gevrey_weight):
    z = ZonePartition()
    t = 0.3
    bound = math.exp(gevrey_weight.log_wm(t))
    assert zone_of(gevrey_weight, z, t, 1.5 * bound) == "Overlap2N"
    assert zone_of(gevrey_weight, z, t, 0.5 * bound) == "Pd"
    assert zone_of(gevrey_weight, z, t, 3.0 * bound) == "Hyp"
    assert zone_of(gevrey_weight, z, t, 1.5) == "BelowCutoff"


@pytest.mark.parametrize("s,expected", [(3.0, True), (2.7, True), (1.9, False), (2.0001, False)])
def test_decay_condition(quartic, s, expected):
    # log(lambda^2 w^2) = (8 - 15 s / (2 (s - 1))) log t + const for lambda = t^4
    rep = check_decay_condition(LeviWeight(2, s, quartic))
    assert rep.passed is expected
    net = 8 - 5 * s / (s - 1)
    slope = np.polyfit(rep.log_t, rep.log_products, 1)[0]
    assert slope == pytest.approx(net, rel=1e-9)


def test_levi_part_grows_like_cube_root(gevrey_weight):
    z = ZonePartition()
    vals = [levi_part(gevrey_weight, z, x) / x ** (1 / 3) for x in (1e4, 1e6, 1e9)]
    # W w = 4 Lambda^(1/4) Lambda^(-3/4) = 4 Lambda^(-1/2) and Lambda = x^(-2/3)
    assert vals == pytest.approx([4.0] * 3, rel=1e-9)


def test_weight_integral_items(gevrey_weight):
    rep = verify_weight_integrals(gevrey_weight, ZonePartition(), np.geomspace(1e4, 1e9, 12))
    assert rep.i_pass and rep.ii_positive and rep.iii_pass
    # first ratio is exactly constant for the power weight
    assert np.ptp(rep.first_ratio) < 1e-9 * rep.first_ratio.mean()
    # -w' m Lambda/(lambda w) equals s/(s-1) = 1.5 for the power weight
    assert rep.ii_max == pytest.approx(1.5, rel=1e-6)
    assert not rep.ii_literal_pass


def test_rho_bounds(gevrey_weight):
    rep = verify_rho_bounds(gevrey_weight, np.geomspace(1e-3, 1, 30), np.geomspace(1e3, 1e8, 6))
    assert rep.passed


def test_xi_from_bracket():
    assert xi_from_bracket(1.0) == 0.0
    assert xi_from_bracket(math.sqrt(2)) == pytest.approx(1.0)


def test_invalid_weights(quartic):
    with pytest.raises(DomainError):
        LeviWeight(2, 1.0, quartic)
    with pytest.raises(DomainError):
        LeviWeight(1, 3.0, quartic)
    with pytest.raises(DomainError):
        LeviWeight(2, 3.0, quartic, m_tilde=0, beta_tilde=1.0)
