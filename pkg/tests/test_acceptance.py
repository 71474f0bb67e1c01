"""Acceptance criteria 1-11.

Criteria 1-10 run once into a temporary directory with one worker; criterion
11 repeats them with eight workers and compares the artifact trees byte for
byte. Every criterion reports one PASS/FAIL line (shown in the terminal
summary).
"""

import pytest

from hypwp.acceptance import CRITERIA, compare_trees, run_criterion

LINES = []


def _run_all(out, workers):
    return {int(fn.__name__.split("_")[1]): run_criterion(fn, out, workers) for fn in CRITERIA}


@pytest.fixture(scope="session")
def serial_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance_w1")
    return out, _run_all(out, 1)


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(serial_run, number):
    res = serial_run[1][number]
    LINES.append(res.line())
    print(res.line())
    assert res.passed, res.line()
    assert res.in_time, res.line()


def test_criterion_11_determinism(serial_run, tmp_path_factory):
    out8 = tmp_path_factory.mktemp("acceptance_w8")
    _run_all(out8, 8)
    diff = compare_trees(serial_run[0], out8)
    files = sum(1 for p in serial_run[0].rglob("*") if p.is_file())
    line = (f"criterion 11 {'PASS' if not diff else 'FAIL'}: artifacts identical for workers 1 and 8: "
            f"{files - len(diff)}/{files} files byte-identical [tolerance exact]")
    LINES.append(line)
    print(line)
    assert files > 0
    assert diff == [], diff
