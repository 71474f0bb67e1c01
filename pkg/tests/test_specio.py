import json

import pytest

from hypwp.errors import SpecError
from hypwp.specio import coefficient_from_dict, get_complex, load_model, load_problem, problem_from_dict
from hypwp.report import dumps_json

BASE = {"shape": {"kind": "monomial", "l": 4}, "levi_weight": {"m": 2, "s": 3}}


def test_defaults_filled_in():
    ps = problem_from_dict(BASE)
    assert ps.mu.kind == "lipschitz"
    assert ps.ws.kind == "gevrey" and ps.ws.s_star == 3
    assert ps.eta.kind == "total_weight"
    assert ps.zones.N == 1.0 and ps.zones.M_cut == 2.0


def test_complex_numbers_as_pairs():
    assert get_complex({"c": [0, -1]}, "c") == -1j
    with pytest.raises(SpecError):
        get_complex({"c": [1, 2, 3]}, "c")


@pytest.mark.parametrize("d", [
    {"kind": "const", "value": 2.5},
    {"kind": "power", "c": [0, -1], "p": 1.0},
    {"kind": "power", "c": 1.0, "p": 0.5, "shift": 0.5, "modulus": {"kind": "hoelder", "alpha": 0.5}},
    {"kind": "poly", "coeffs": [1, 0, [0, 2]]},
])
def test_coefficient_kinds_evaluate(d):
    a = coefficient_from_dict(d, 1.0, "coef")
    assert isinstance(complex(a(0.3)), complex)
    assert json.loads(dumps_json(a.to_dict()))


def test_levi_coefficient_only_for_lower_terms():
    with pytest.raises(SpecError, match="lower-order"):
        coefficient_from_dict({"kind": "levi"}, 1.0, "model.principal[0]")


@pytest.mark.parametrize("patch,field", [
    ({"levi_weight": {"m": 2}}, "levi_weight.s"),
    ({"levi_weight": {"m": 2.5, "s": 3}}, "levi_weight.m"),
    ({"zones": {"N": -1}}, "zones.N"),
    ({"modulus": {"kind": "bumpy"}}, "modulus.kind"),
    ({"eta": {"kind": "power"}}, "eta.theta"),
])
def test_errors_name_field(patch, field):
    doc = {**BASE, **patch}
    with pytest.raises(SpecError) as e:
        problem_from_dict(doc)
    assert e.value.path == field


def test_missing_shape_section():
    with pytest.raises(SpecError, match="shape"):
        problem_from_dict({"levi_weight": {"m": 2, "s": 3}})


def test_line_number_attached(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{\n  "shape": {"kind": "monomial", "l": 4},\n\n  "levi_weight": {"m": 2, "s": true}\n}\n')
    with pytest.raises(SpecError) as e:
        load_problem(p)
    assert e.value.line == 4
    assert "line 4" in str(e.value)


def test_model_principal_length_checked(tmp_path):
    doc = {**BASE, "model": {"principal": [{"kind": "const", "value": 1}]}}
    p = tmp_path / "m.json"
    p.write_text(json.dumps(doc, indent=1))
    with pytest.raises(SpecError) as e:
        load_model(p)
    assert e.value.path == "model.principal"


def test_model_lower_index_checked():
    from hypwp.specio import model_from_dict

    doc = {**BASE, "model": {"principal": [{"kind": "const", "value": 1}, {"kind": "const", "value": 0}],
                             "lower": [{"j": 1, "gamma": 1, "coef": {"kind": "const", "value": 1}}]}}
    with pytest.raises(SpecError, match="j \\+ gamma"):
        model_from_dict(doc)


def test_non_hyperbolic_model_is_input_error():
    from hypwp.specio import model_from_dict

    doc = {**BASE, "model": {"principal": [{"kind": "const", "value": -1}, {"kind": "const", "value": 0}]}}
    with pytest.raises(SpecError, match="hyperbolic"):
        model_from_dict(doc)
