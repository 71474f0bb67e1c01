"""JSON problem files.

One document describes one experiment::

    {
      "shape": {"kind": "monomial", "l": 4, "T": 1},
      "levi_weight": {"m": 2, "s": 3, "m_tilde": 0, "beta_tilde": 0},
      "zones": {"N": 1, "M_cut": 2},
      "modulus": {"kind": "lipschitz"},
      "weight_sequence": {"kind": "gevrey", "s_star": 3, "A": 1, "P_max": 20000},
      "eta": {"kind": "power", "theta": 0.3333, "delta0": 0.5},
      "model": {
        "principal": [{"kind": "const", "value": 1}, {"kind": "const", "value": 0}],
        "lower": [{"j": 0, "gamma": 1, "coef": {"kind": "power", "c": [0, -1], "p": 1}}]
      }
    }

Only ``shape`` and ``levi_weight`` are required. Complex numbers are
written as [re, im]. ``principal[j]`` multiplies lambda^(m-j) xi^(m-j) D_t^j.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

from .errors import DomainError, SpecError


def _where(path, key):
    return f"{path}.{key}" if path else key


def get_number(d, key, path="", default=None, positive=False):
    if not isinstance(d, dict):
        raise SpecError("expected an object", path)
    if key not in d:
        if default is None:
            raise SpecError(f"missing field {key!r}", _where(path, key))
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"expected a number, got {v!r}", _where(path, key))
    v = float(v)
    if not math.isfinite(v) and not (math.isinf(v) and v > 0 and key == "s"):
        raise SpecError("number must be finite", _where(path, key))
    if positive and not v > 0:
        raise SpecError(f"must be positive, got {v!r}", _where(path, key))
    return v


def get_int(d, key, path="", default=None):
    v = get_number(d, key, path, default=None if default is None else float(default))
    if not float(v).is_integer():
        raise SpecError(f"expected an integer, got {v!r}", _where(path, key))
    return int(v)


def get_complex(d, key, path="", default=None):
    if isinstance(d, dict) and isinstance(d.get(key), list):
        v = d[key]
        if len(v) != 2 or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
            raise SpecError("complex numbers are written as [re, im]", _where(path, key))
        return complex(v[0], v[1])
    return get_number(d, key, path, default)


def _obj(d, key, path, required=True):
    v = d.get(key)
    if v is None:
        if required:
            raise SpecError(f"missing section {key!r}", _where(path, key))
        return None
    if not isinstance(v, dict):
        raise SpecError("expected an object", _where(path, key))
    return v


def coefficient_from_dict(d, T, path, lw=None, j=None, gamma=None):
    from .moduli import Modulus
    from .mollify import const, poly, power

    if not isinstance(d, dict):
        raise SpecError("coefficient must be an object", path)
    kind = d.get("kind")
    if kind == "const":
        return const(get_complex(d, "value", path), T)
    if kind == "power":
        mod = Modulus.from_dict(d["modulus"], _where(path, "modulus")) if "modulus" in d else None
        return power(get_complex(d, "c", path), get_number(d, "p", path),
                     get_number(d, "shift", path, default=0.0), T, mod)
    if kind == "poly":
        coeffs = d.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs:
            raise SpecError("poly needs a nonempty coeffs list", _where(path, "coeffs"))
        return poly([get_complex({"c": c}, "c", _where(path, f"coeffs[{i}]")) for i, c in enumerate(coeffs)], T)
    if kind == "levi":
        if lw is None:
            raise SpecError("levi coefficients are allowed for lower-order terms only", path)
        from .spectral import levi_coefficient

        return levi_coefficient(lw, j, gamma, get_complex(d, "scale", path, default=1.0),
                                get_number(d, "cap", path, default=1e3, positive=True))
    raise SpecError(f"unknown coefficient kind {kind!r}", _where(path, "kind"))


def levi_weight_from_dict(d, shape, path="levi_weight"):
    from .analysis import log_squared_levi_weight
    from .leviweight import LeviWeight

    if d.get("kind") == "log_squared":
        return log_squared_levi_weight(shape, get_int(d, "m", path, default=2))
    m = get_int(d, "m", path)
    s = get_number(d, "s", path)
    return LeviWeight(m, s, shape, m_tilde=get_int(d, "m_tilde", path, default=0),
                      beta_tilde=get_number(d, "beta_tilde", path, default=0.0))


def problem_from_dict(doc):
    """ProblemSpec from a parsed document."""
    from .analysis import ProblemSpec, WeightFunction
    from .leviweight import ZonePartition
    from .moduli import Modulus, WeightSequence
    from .shape import ShapeFunction

    if not isinstance(doc, dict):
        raise SpecError("top level must be an object")
    shape = ShapeFunction.from_dict(_obj(doc, "shape", ""), "shape")
    lw = levi_weight_from_dict(_obj(doc, "levi_weight", ""), shape)
    zd = _obj(doc, "zones", "", required=False) or {}
    zones = ZonePartition(get_number(zd, "N", "zones", default=1.0, positive=True),
                          get_number(zd, "M_cut", "zones", default=2.0))
    md = _obj(doc, "modulus", "", required=False)
    mu = Modulus.from_dict(md, "modulus") if md else Modulus("lipschitz")
    wd = _obj(doc, "weight_sequence", "", required=False)
    if wd:
        ws = WeightSequence.from_dict(wd, "weight_sequence")
    elif lw.s is not None and math.isfinite(lw.s):
        ws = WeightSequence("gevrey", s_star=lw.s)
    else:
        ws = WeightSequence("logfactorial")
    ed = _obj(doc, "eta", "", required=False)
    eta = weight_function_from_dict(ed) if ed else WeightFunction("total_weight")
    nu = get_number(doc, "nu", "", default=0.0)
    return ProblemSpec(lw, mu, ws, eta, zones, nu)


def weight_function_from_dict(d, path="eta"):
    from .analysis import WeightFunction

    kind = d.get("kind")
    kw = {"delta0": get_number(d, "delta0", path, default=1.0, positive=True),
          "delta1": get_number(d, "delta1", path, default=1.0, positive=True)}
    if kind == "power":
        return WeightFunction(kind, theta=get_number(d, "theta", path), **kw)
    if kind == "power_over_log":
        return WeightFunction(kind, theta=get_number(d, "theta", path), kappa=get_number(d, "kappa", path), **kw)
    if kind == "log_corrected":
        return WeightFunction(kind, s=get_number(d, "s", path), **kw)
    if kind == "total_weight":
        return WeightFunction(kind, scale=get_number(d, "scale", path, default=1.0, positive=True), **kw)
    raise SpecError(f"unknown weight kind {kind!r}", _where(path, "kind"))


def model_from_dict(doc, ps=None):
    """ModelProblem from a parsed document (its ``model`` section)."""
    from .spectral import ModelProblem

    ps = ps or problem_from_dict(doc)
    md = _obj(doc, "model", "")
    lw = ps.lw
    T = lw.shape.T
    pr = md.get("principal")
    if not isinstance(pr, list) or len(pr) != lw.m:
        raise SpecError(f"principal must list {lw.m} coefficients (one per power of D_t)", "model.principal")
    principal = [coefficient_from_dict(c, T, f"model.principal[{j}]") for j, c in enumerate(pr)]
    lower = {}
    for i, entry in enumerate(md.get("lower", [])):
        p = f"model.lower[{i}]"
        j = get_int(entry, "j", p)
        g = get_int(entry, "gamma", p)
        if j < 0 or g < 0 or j + g >= lw.m:
            raise SpecError("lower-order terms need j + gamma < m", p)
        lower[(j, g)] = coefficient_from_dict(entry.get("coef"), T, _where(p, "coef"), lw, j, g)
    try:
        return ModelProblem(lw.m, principal, lower, lw, ps.zones, ps.mu,
                            strictly_hyperbolic=bool(md.get("strictly_hyperbolic", False)))
    except DomainError as exc:
        raise SpecError(str(exc), "model") from exc


def _line_of(text, path):
    """Best-effort line number of the last key in a dotted path."""
    if not path:
        return None
    key = re.sub(r"\[\d+\]$", "", path.split(".")[-1])
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return None
    return text.count("\n", 0, m.start()) + 1


def read_document(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read problem file: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc
    return doc, text


def _with_line(exc, text):
    if exc.line is None and exc.path:
        exc.line = _line_of(text, exc.path)
        exc.args = (exc.format(),)
    return exc


def load_problem(path):
    doc, text = read_document(path)
    try:
        return problem_from_dict(doc)
    except SpecError as exc:
        raise _with_line(exc, text)
    except DomainError as exc:
        raise SpecError(str(exc), line=None) from exc


def load_model(path, ps=None):
    doc, text = read_document(path)
    try:
        return model_from_dict(doc, ps)
    except SpecError as exc:
        raise _with_line(exc, text)
    except DomainError as exc:
        raise SpecError(str(exc)) from exc
