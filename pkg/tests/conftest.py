import math
import sys

import numpy as np
import pytest

from hypwp import LeviWeight, ShapeFunction, ZonePartition
from hypwp.analysis import ProblemSpec, WeightFunction
from hypwp.moduli import Modulus, WeightSequence


@pytest.fixture
def quartic():
    return ShapeFunction.monomial(4)


@pytest.fixture
def gevrey_weight(quartic):
    """m=2, s=3 power weight on lambda = t^4."""
    return LeviWeight(2, 3.0, quartic)


@pytest.fixture
def gevrey_problem(gevrey_weight):
    return ProblemSpec(gevrey_weight, Modulus("lipschitz"), WeightSequence("gevrey", s_star=2.0, P_max=20000),
                       WeightFunction("power", theta=0.5, delta0=0.5), ZonePartition(), 0.0)


def geom(lo, hi, n):
    return np.geomspace(lo, hi, n)


def close(a, b, rel):
    return math.isclose(a, b, rel_tol=rel)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
