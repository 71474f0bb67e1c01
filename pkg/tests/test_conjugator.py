import math

import numpy as np
import pytest

from hypwp import ConjugatorConfig, LeviWeight, ShapeFunction, ZonePartition, phi_addends, t_xi, verify_phi_reduction
from hypwp.conjugator import majorant3, phi_value
from hypwp.errors import DomainError
from hypwp.leviweight import log_rho

XI = np.geomspace(1e3, 1e8, 6)
T0 = np.concatenate([[0.0], np.geomspace(1e-2, 1.0, 6)])


@pytest.fixture
def cfg(gevrey_problem):
    return ConjugatorConfig(gevrey_problem)


def test_addend_count_and_energy_term(cfg):
    ad = phi_addends(cfg, 0.5, 1e4)
    assert len(ad) == 8
    assert ad[7] == pytest.approx(-(1.0 - 0.5) * 1e4 ** (1 / 3), rel=1e-14)
    assert phi_value(cfg, 0.5, 1e4) == pytest.approx(sum(ad))


def test_origin_leaves_only_energy(cfg):
    ad = phi_addends(cfg, 0.0, 1e5)
    assert ad[:7] == [0.0] * 7


@pytest.mark.parametrize("x", [1e3, 1e5, 1e7])
def test_second_addend_is_log_rho_at_boundary(cfg, x):
    tx = t_xi(cfg.lw, cfg.zones, x).t
    assert phi_addends(cfg, tx, x)[1] == pytest.approx(log_rho(cfg.lw, tx, x), rel=1e-8)


def test_sixth_addend_below_final_primitive(cfg):
    for x in XI:
        assert phi_addends(cfg, 1.0, x)[5] <= 0.2 * (1 + 1e-12)


def test_default_split_time_is_clamped(cfg):
    # Lambda(T) = 1/5 < 1/e for lambda = t^4
    assert cfg.t1_value == 1.0
    lw = LeviWeight(2, 3.0, ShapeFunction.monomial(1, T=2.0))
    c2 = ConjugatorConfig(cfg.ps.__class__(lw, cfg.ps.mu, cfg.ps.ws, cfg.ps.eta, ZonePartition(), 0.0))
    assert lw.shape.Lam(c2.t1_value) == pytest.approx(math.exp(-1), rel=1e-12)


def test_reduction_constants_bounded(cfg):
    rep = verify_phi_reduction(cfg, XI, T0)
    assert rep.passed, rep.trends
    c = rep.constants
    assert c["C6"] <= 0.2 * (1 + 1e-12)
    assert rep.kappa_threshold == pytest.approx(0.0, abs=1e-12)


def test_fifth_addend_ratio_with_early_split(gevrey_problem):
    # with t1 = 0.1 the ratio is dominated by int (1 - chi) d log Lambda <= log(Lambda(T)/Lambda(t1)) + 1
    cfg = ConjugatorConfig(gevrey_problem, t1=0.1)
    rep = verify_phi_reduction(cfg, XI, T0)
    bound = math.log(0.2 / (0.1 ** 5 / 5)) + 1
    assert np.all(np.isfinite(rep.c5_series))
    assert rep.c5_series.max() <= bound


def test_majorant_monotone_in_time(cfg):
    vals = [majorant3(cfg, t, 1e5) for t in (0.2, 0.5, 1.0)]
    assert vals[0] <= vals[1] <= vals[2]


def test_invalid_configs(gevrey_problem, cfg):
    with pytest.raises(DomainError):
        ConjugatorConfig(gevrey_problem, kappa=0.0)
    with pytest.raises(DomainError):
        ConjugatorConfig(gevrey_problem, M_tilde=(1,) * 6)
    with pytest.raises(DomainError):
        phi_addends(cfg, 2.0, 1e4)
    with pytest.raises(DomainError):
        phi_addends(cfg, 0.5, 1.5)
