"""Command-line front end.

    hypwp analyze  --spec problem.json --out runs/a
    hypwp weights  --spec problem.json --out runs/w --xi-points 8
    hypwp simulate --spec model.json   --out runs/s --xi-min 100 --xi-max 1e4 --workers 4
    hypwp verify   --spec problem.json --out runs/v
    hypwp fit      --spec problem.json --out runs/f

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 numerical error.
Set HYPWP_LOG=DEBUG (or INFO, WARNING) for progress messages on stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DomainError, HypwpError, NumericalError, SpecError
from .report import write_csv, write_json

log = logging.getLogger("hypwp")

COMMANDS = ("analyze", "weights", "simulate", "verify", "fit")
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

# per-command frequency grid defaults (min, max, points)
_GRID_DEFAULTS = {"simulate": (1e2, 1e4, 9)}
_GRID_FALLBACK = (1e3, 1e8, 21)


@dataclass
class RunConfig:
    command: str
    spec_path: Path
    out_dir: Path
    xi_min: float
    xi_max: float
    xi_points: int
    tol: float = 1e-10
    workers: int = 1
    seed: int = 0

    def validate(self, M_cut: float):
        if self.command not in COMMANDS:
            raise SpecError(f"unknown command {self.command!r}")
        if self.xi_points < 8:
            raise SpecError("--xi-points must be at least 8", "xi_points")
        if not self.xi_min >= M_cut:
            raise SpecError(f"--xi-min must be >= M_cut = {M_cut:g}", "xi_min")
        if not self.xi_max > self.xi_min:
            raise SpecError("--xi-max must exceed --xi-min", "xi_max")
        if not 0 < self.tol <= 1e-4:
            raise SpecError("--tol must lie in (0, 1e-4]", "tol")
        if self.workers < 1:
            raise SpecError("--workers must be >= 1", "workers")

    @property
    def grid(self) -> np.ndarray:
        return np.geomspace(self.xi_min, self.xi_max, self.xi_points)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypwp", description="Weight calculus lab for weakly hyperbolic Cauchy problems")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", required=True, type=Path, help="JSON problem file")
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument("--xi-min", type=float, default=None)
    p.add_argument("--xi-max", type=float, default=None)
    p.add_argument("--xi-points", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-10, help="integrator tolerance (simulate)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="seed for sampled property checks")
    return p


def config_from_args(argv=None) -> RunConfig:
    a = _parser().parse_args(argv)
    lo, hi, n = _GRID_DEFAULTS.get(a.command, _GRID_FALLBACK)
    return RunConfig(a.command, a.spec, a.out,
                     a.xi_min if a.xi_min is not None else lo,
                     a.xi_max if a.xi_max is not None else hi,
                     a.xi_points if a.xi_points is not None else n,
                     a.tol, a.workers, a.seed)


# commands
def _analyze(cfg, ps, doc):
    from .analysis import classify

    res = classify(ps, cfg.grid, seed=cfg.seed)
    write_json(cfg.out_dir / "classification.json", res.to_dict())
    print(f"verdict: {res.verdict}")
    if res.failing:
        print("failing: " + ", ".join(res.failing))
    return EXIT_OK


def _weights(cfg, ps, doc):
    from .leviweight import t_xi

    lw, z = ps.lw, ps.zones
    rows = []
    for x in cfg.grid:
        tx = t_xi(lw, z, x)
        ell = tx.log_Lambda
        w = math.exp(lw.log_wm_ell(ell) / lw.m)
        W = math.exp(lw.log_W_ell(ell))
        M = W * w ** (lw.m - 1) + ps.mu.phi(x)
        rows.append((x, tx.t, w, W, M))
    path = write_csv(cfg.out_dir / "weights.csv", ("xi", "t_xi", "w", "W", "M"), rows)
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


def _simulate(cfg, ps, doc):
    from .specio import model_from_dict
    from .spectral import LOSS_COLUMNS, measure_loss

    if "model" not in doc:
        raise SpecError("simulate needs a model section", "model")
    mp = model_from_dict(doc, ps)
    rep = measure_loss(mp, cfg.grid, tol=cfg.tol, workers=cfg.workers)
    write_csv(cfg.out_dir / "loss.csv", LOSS_COLUMNS, rep.rows())
    summary = rep.summary()
    summary["levi_constants"] = mp.levi_constants
    write_json(cfg.out_dir / "loss.json", summary)
    print(f"theta = {summary['theta']:.6g}, log-amplification/M max = {summary['ratio_max']:.6g}")
    return EXIT_OK


def verification_suite(ps, doc, grid, seed=0, workers=1) -> dict:
    """Every invariant suite that applies to the problem. Returns name -> {pass, gating, ...}."""
    from .analysis import check_eta_admissible
    from .leviweight import check_decay_condition, verify_weight_integrals, verify_rho_bounds
    from .moduli import check_sequence_inequality, check_modulus
    from .shape import check_shape_conditions

    lw = ps.lw
    s_eff = lw.s if lw.s is not None else math.inf
    out = {}

    def run(name, fn, gating=True):
        try:
            passed, evidence = fn()
        except (DomainError, NumericalError) as exc:
            passed, evidence = False, {"error": str(exc)}
        out[name] = {"pass": bool(passed), "gating": gating, "evidence": evidence}

    run("s_range", lambda: (lw.s_in_range(), {"s": s_eff, "m": lw.m}))
    run("shape_condition", lambda: _rep(check_shape_conditions(lw.shape, s_eff, lw.m)))
    run("decay_condition", lambda: _rep(check_decay_condition(lw)))
    run("rho_bounds", lambda: _rep(verify_rho_bounds(lw, np.geomspace(lw.shape.T * 1e-3, lw.shape.T, 40), grid)))

    def weight_integrals(literal):
        rep = verify_weight_integrals(lw, ps.zones, grid)
        ok = rep.passed if literal else rep.passed_empirical_constant
        return ok, rep.to_dict()

    run("weight_integrals", lambda: weight_integrals(False))
    run("decay_bound_literal", lambda: weight_integrals(True), gating=False)
    if ps.mu.kind != "custom":
        run("modulus", lambda: _rep(check_modulus(ps.mu, seed=seed)))
    run("sequence_inequality", lambda: _rep(check_sequence_inequality(ps.ws, ps.eta_at, ps.eta.delta0, grid)))
    run("eta_little_o", lambda: (lambda r: (r.trend_pass, r.to_dict()))(
        check_eta_admissible(ps, "Little_o", grid, seed=seed)), gating=False)
    if "model" in doc:
        run("model", lambda: _model_checks(ps, doc))
    return out


def _rep(rep):
    return rep.passed, rep.to_dict()


def _model_checks(ps, doc):
    from .specio import model_from_dict
    from .spectral import char_roots, h_symbol

    mp = model_from_dict(doc, ps)
    T = mp.T
    bad = []
    for x in (10.0, 1e3, 1e5):
        for t in np.linspace(T * 0.05, T, 8):
            r = char_roots(mp, t, x)
            if np.min(np.diff(r)) <= 0:
                bad.append(("roots", t, x))
            if h_symbol(mp, t, x) < 1 - 1e-12 and not mp.strictly_hyperbolic:
                bad.append(("h", t, x))
    return not bad, {"levi_constants": mp.levi_constants, "violations": bad[:10]}


def _verify(cfg, ps, doc):
    res = verification_suite(ps, doc, cfg.grid, cfg.seed, cfg.workers)
    failing = [k for k, v in res.items() if v["gating"] and not v["pass"]]
    write_json(cfg.out_dir / "verify.json", {"pass": not failing, "failing": failing, "checks": res})
    for name, v in res.items():
        tag = "PASS" if v["pass"] else ("FAIL" if v["gating"] else "note")
        print(f"{tag:4s} {name}")
    return EXIT_FAIL if failing else EXIT_OK


def _fit(cfg, ps, doc):
    from .analysis import (Series, asymptotic_fit, power_reference, log_corrected_reference,
                           log_squared_reference, iterated_log_reference, weight_series)

    lw = ps.lw
    fd = doc.get("fit", {}) if isinstance(doc.get("fit", {}), dict) else {}
    ref = fd.get("reference")
    if ref is None:
        if lw.custom_log_wm is not None:
            ref = "log_squared"
        elif lw.beta_tilde == 0:
            ref = "power"
        else:
            ref = "iterated_log"
    x = cfg.grid
    refs = {
        "power": lambda: power_reference(lw.s, x),
        "log_corrected": lambda: log_corrected_reference(lw.s, x),
        "iterated_log": lambda: iterated_log_reference(lw.s, lw.m_tilde, lw.beta_tilde, x),
        "log_squared": lambda: log_squared_reference(x),
    }
    if ref not in refs:
        raise SpecError(f"unknown reference {ref!r}", "fit.reference")
    tol = fd.get("tol")
    rep = asymptotic_fit(weight_series(ps, x, part="levi"), Series(x, refs[ref]()), tol)
    d = rep.to_dict()
    d["reference"] = ref
    write_json(cfg.out_dir / "fit.json", d)
    print(f"ratio drift slope vs {ref}: {rep.ratio_drift_slope:.6g}")
    return EXIT_FAIL if rep.passed is False else EXIT_OK


_HANDLERS = {"analyze": _analyze, "weights": _weights, "simulate": _simulate, "verify": _verify, "fit": _fit}


def run(cfg: RunConfig) -> int:
    from .specio import problem_from_dict, read_document, _with_line

    doc, text = read_document(cfg.spec_path)
    try:
        ps = problem_from_dict(doc)
        cfg.validate(ps.zones.M_cut)
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        return _HANDLERS[cfg.command](cfg, ps, doc)
    except SpecError as exc:
        raise _with_line(exc, text)


def _setup_logging():
    level = os.environ.get("HYPWP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[list] = None) -> int:
    _setup_logging()
    try:
        cfg = config_from_args(argv)
    except SystemExit as exc:  # argparse
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return run(cfg)
    except SpecError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error during {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HypwpError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
