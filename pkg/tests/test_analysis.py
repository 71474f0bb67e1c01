import math

import numpy as np
import pytest

from hypwp import LeviWeight, Modulus, ShapeFunction, WeightSequence, ZonePartition, classify, total_weight
from hypwp.analysis import (ProblemSpec, Series, WeightFunction, asymptotic_fit, check_eta_admissible, dominance,
                            power_reference, log_corrected_reference, weight_series)


def _ps(lw, mu=None, ws=None, eta=None):
    return ProblemSpec(lw, mu or Modulus("lipschitz"), ws or WeightSequence("gevrey", s_star=2.0, P_max=20000),
                       eta or WeightFunction("total_weight"), ZonePartition(), 0.0)


def test_total_weight_is_levi_plus_one(gevrey_weight):
    ps = _ps(gevrey_weight)
    for x in (1e4, 1e8):
        assert total_weight(ps, x) == pytest.approx(4 * x ** (1 / 3) + 1, rel=1e-9)


def test_fit_against_cube_root(gevrey_weight):
    xi = np.geomspace(1e4, 1e9, 16)
    rep = asymptotic_fit(weight_series(_ps(gevrey_weight), xi, part="total"), Series(xi, power_reference(3.0, xi)),
                         0.01)
    assert rep.passed


def test_fit_against_log_corrected_closed_form(quartic):
    lw = LeviWeight(2, 3.0, quartic, m_tilde=1, beta_tilde=1.0)
    xi = np.geomspace(1e4, 1e9, 16)
    rep = asymptotic_fit(weight_series(lw, xi), Series(xi, log_corrected_reference(3.0, xi)), 0.02)
    assert rep.passed


@pytest.mark.parametrize("alpha,label", [(0.8, "LeviDominant"), (0.5, "ModulusDominant"),
                                         (2 / 3, "Comparable")])
def test_dominance(gevrey_weight, alpha, label):
    got, _ = dominance(_ps(gevrey_weight, Modulus("hoelder", alpha=alpha)), (1e4, 1e9))
    assert got == label


def test_comparable_addends_share_growth(gevrey_weight):
    ps = _ps(gevrey_weight, Modulus("hoelder", alpha=2 / 3))
    xi = np.geomspace(1e4, 1e9, 11)
    for part in ("levi", "phi"):
        v = weight_series(ps, xi, part=part).values
        assert np.polyfit(np.log(xi), np.log(v), 1)[0] == pytest.approx(1 / 3, abs=1e-3)


def test_little_o_for_slower_power(gevrey_weight):
    ps = _ps(gevrey_weight, eta=WeightFunction("power", theta=0.5))
    assert check_eta_admissible(ps, "Little_o").trend_pass


def test_little_o_fails_for_total_weight(gevrey_weight):
    ps = _ps(gevrey_weight)
    rep = check_eta_admissible(ps, "Little_o")
    assert not rep.little_o and rep.big_o


def test_little_o_loginverse_with_log_corrected_power(gevrey_weight):
    eta = WeightFunction("power_over_log", theta=1.0, kappa=1.0)
    ps = _ps(gevrey_weight, Modulus("loginverse", alpha=2.0), eta=eta)
    assert check_eta_admissible(ps, "Little_o").trend_pass


def test_classify_gevrey_example_is_global(gevrey_problem):
    res = classify(gevrey_problem)
    assert res.verdict == "GlobalWellPosed", res.failing


def test_classify_small_s_not_covered(quartic):
    ps = _ps(LeviWeight(2, 1.9, quartic), ws=WeightSequence("gevrey", s_star=1.5, P_max=20000),
             eta=WeightFunction("power", theta=0.5, delta0=0.5))
    res = classify(ps)
    assert res.verdict == "NotCovered"
    assert "decay_condition" in res.failing
