"""Total loss weight, admissibility audits for a solution-space weight, and classification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._numerics import bracket, iterated_logs, loglog_slope
from .errors import DomainError, HypwpError, SpecError
from .leviweight import LeviWeight, ZonePartition, check_decay_condition, levi_part, t_xi
from .moduli import Modulus, WeightSequence, check_sequence_inequality
from .shape import check_shape_conditions

WEIGHT_KINDS = ("power", "power_over_log", "log_corrected", "total_weight", "custom")


@dataclass(frozen=True)
class WeightFunction:
    """Candidate weight eta(<xi>) of the solution space.

    power(theta)                  x^theta
    power_over_log(theta, kappa)  x^theta (log x)^-kappa
    log_corrected(s)      q^(1/s) log q log log q with q = x / ((s-1)/s log x)
    total_weight(scale)           scale * M(x) of the enclosing problem
    custom(func)                  any callable
    """

    kind: str
    theta: Optional[float] = None
    kappa: Optional[float] = None
    s: Optional[float] = None
    scale: float = 1.0
    func: Optional[Callable[[float], float]] = field(default=None, compare=False)
    delta0: float = 1.0
    delta1: float = 1.0

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise DomainError(f"unknown weight kind {self.kind!r}")
        if self.kind in ("power", "power_over_log") and not (self.theta is not None and 0 < self.theta <= 1):
            raise DomainError("theta must lie in (0, 1]")
        if self.kind == "power_over_log" and not (self.kappa is not None and self.kappa > 0):
            raise DomainError("kappa must be positive")
        if self.kind == "log_corrected" and not (self.s is not None and self.s > 1):
            raise DomainError("log_corrected needs s > 1")
        if self.kind == "custom" and self.func is None:
            raise DomainError("custom weight needs a callable")
        if not (self.delta0 > 0 and self.delta1 > 0):
            raise DomainError("delta0 and delta1 must be positive")

    def value(self, x: float, total=None) -> float:
        k = self.kind
        if k == "power":
            return x ** self.theta
        if k == "power_over_log":
            return x ** self.theta * math.log(x) ** (-self.kappa)
        if k == "log_corrected":
            c = (self.s - 1) / self.s
            q = x / (c * math.log(x))
            lq = math.log(q)
            return q ** (1 / self.s) * lq * math.log(lq)
        if k == "total_weight":
            if total is None:
                raise DomainError("total_weight eta needs the enclosing problem")
            return self.scale * total(x)
        return float(self.func(x))

    def to_dict(self):
        if self.kind == "custom":
            raise SpecError("custom weights cannot be serialized")
        d = {"kind": self.kind, "delta0": self.delta0, "delta1": self.delta1}
        for key in ("theta", "kappa", "s"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        if self.kind == "total_weight":
            d["scale"] = self.scale
        return d


@dataclass(frozen=True)
class ProblemSpec:
    lw: LeviWeight
    mu: Modulus
    ws: WeightSequence
    eta: WeightFunction
    zones: ZonePartition = ZonePartition()
    nu: float = 0.0

    def eta_at(self, x: float) -> float:
        return self.eta.value(x, total=lambda y: total_weight(self, y))

    def with_eta(self, eta: WeightFunction) -> "ProblemSpec":
        return ProblemSpec(self.lw, self.mu, self.ws, eta, self.zones, self.nu)


def loss_weight(lw: LeviWeight, zones: ZonePartition, mu: Modulus, x: float) -> float:
    """W(Lambda(t_xi)) w(Lambda(t_xi))^(m-1) + phi(x)."""
    return levi_part(lw, zones, x) + mu.phi(x)


def total_weight(ps: ProblemSpec, xi_mag: float) -> float:
    if xi_mag <= ps.zones.M_cut:
        raise DomainError("total weight is defined for <xi> > M_cut")
    return loss_weight(ps.lw, ps.zones, ps.mu, xi_mag)


# closed forms used as references
def power_reference(s: float, x):
    return np.asarray(x, dtype=float) ** (1.0 / s)


def log_corrected_reference(s: float, x):
    """Closed form for m~ = 1, beta~ = 1."""
    x = np.asarray(x, dtype=float)
    c = (s - 1) / s
    q = x / (c * np.log(x))
    return c * q ** (1 / s) * np.log(q)


def iterated_log_reference(s: float, m_tilde: int, beta_tilde: float, x):
    """Closed form of the general characterization for beta~ != 0."""
    out = []
    c = (s - 1) / s
    for v in np.atleast_1d(np.asarray(x, dtype=float)):
        inner = iterated_logs(c * math.log(v), m_tilde)[-1]
        q = v / inner ** (1.0 / beta_tilde)
        outer = iterated_logs(c * math.log(q), m_tilde)[-1]
        out.append(q ** (1 / s) * outer ** beta_tilde)
    return np.array(out)


def log_squared_reference(x):
    return np.log(np.asarray(x, dtype=float)) ** 2


def log_squared_levi_weight(shape, m: int = 2) -> LeviWeight:
    """w^m = Lambda^-1 (log 1/Lambda)^2, supplied through the custom-weight pathway."""
    return LeviWeight.custom(m, shape, _log_squared_log_wm, s=math.inf, name="log_squared")


def _log_squared_log_wm(ell: float) -> float:
    if ell >= 0:
        raise DomainError("log(1/Lambda) must be positive")
    return -ell + 2.0 * math.log(-ell)


# series fits
@dataclass
class Series:
    xi: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.xi.shape != self.values.shape:
            raise DomainError("series grid and values differ in length")


@dataclass
class FitReport:
    ratio_mean: float
    ratio_drift_slope: float
    tol: Optional[float] = None

    @property
    def passed(self) -> Optional[bool]:
        return None if self.tol is None else abs(self.ratio_drift_slope) < self.tol

    def to_dict(self):
        return {"ratio_mean": self.ratio_mean, "ratio_drift_slope": self.ratio_drift_slope,
                "tol": self.tol, "pass": self.passed}


def asymptotic_fit(f: Series, g: Series, tol: Optional[float] = None) -> FitReport:
    """Least-squares slope of log(f/g) against log <xi>."""
    if f.xi.shape != g.xi.shape or not np.allclose(f.xi, g.xi, rtol=1e-14, atol=0):
        raise DomainError("asymptotic_fit needs aligned grids")
    ratio = f.values / g.values
    return FitReport(float(np.mean(ratio)), loglog_slope(f.xi, ratio), tol)


def weight_series(ps_or_lw, xi_grid, zones: Optional[ZonePartition] = None, part: str = "levi") -> Series:
    """Levi part, modulus part or total weight sampled on a grid."""
    xi = np.asarray(xi_grid, dtype=float)
    if isinstance(ps_or_lw, ProblemSpec):
        ps = ps_or_lw
        fn = {"levi": lambda x: levi_part(ps.lw, ps.zones, x),
              "phi": ps.mu.phi,
              "total": lambda x: total_weight(ps, x)}[part]
    else:
        z = zones or ZonePartition()
        fn = lambda x: levi_part(ps_or_lw, z, x)  # noqa: E731
    return Series(xi, np.array([fn(x) for x in xi]))


def dominance(ps: ProblemSpec, xi_range, points: int = 25, tol: float = 0.02):
    """Which addend of the total weight grows faster.

    Returns the label and the ratio series levi/phi.
    """
    lo, hi = xi_range
    if hi / lo < 1e3:
        raise DomainError("dominance needs at least three decades")
    xi = np.geomspace(lo, hi, points)
    levi = weight_series(ps, xi, part="levi").values
    phi = weight_series(ps, xi, part="phi").values
    slope = loglog_slope(xi, levi / phi)
    label = "LeviDominant" if slope > tol else ("ModulusDominant" if slope < -tol else "Comparable")
    return label, Series(xi, levi / phi)


# eta admissibility
def _log_derivs(fn, x: float, h: float = 1e-3):
    """(s f'(s)/f(s), s^2 f''(s)/f(s)) by central differences in log s."""
    lx = math.log(x)
    fm, f0, fp = fn(math.exp(lx - h)), fn(x), fn(math.exp(lx + h))
    d1 = (fp - fm) / (2 * h)
    d2 = (fp - 2 * f0 + fm) / (h * h)
    return d1 / f0, (d2 - d1) / f0


def _bounded_tail(values, factor: float = 2.0) -> bool:
    v = np.abs(np.asarray(values, dtype=float))
    if not np.all(np.isfinite(v)):
        return False
    k = max(1, len(v) // 3)
    return bool(v[-k:].max() <= factor * v[:k].max() + 1e-9)


@dataclass
class EtaReport:
    mode: str
    xi: np.ndarray
    ratio: np.ndarray
    trend_slope: float
    decay_factor: float
    eta_violations: int
    total_violations: int
    eta_deriv_max: tuple
    total_deriv_max: tuple
    derivatives_bounded: bool
    slope_tol: float = 0.02

    @property
    def little_o(self) -> bool:
        dec = bool(np.all(np.diff(self.ratio) <= 0))
        return dec and self.decay_factor >= 2.0

    @property
    def big_o(self) -> bool:
        return bool(np.all(np.isfinite(self.ratio))) and self.trend_slope <= self.slope_tol

    @property
    def trend_pass(self) -> bool:
        return self.little_o if self.mode == "Little_o" else self.big_o

    @property
    def subadditive(self) -> bool:
        return self.eta_violations == 0 and self.total_violations == 0

    @property
    def passed(self) -> bool:
        return self.trend_pass and self.subadditive and self.derivatives_bounded

    def to_dict(self):
        return {
            "mode": self.mode, "pass": self.passed, "little_o": self.little_o, "big_o": self.big_o,
            "trend_slope": self.trend_slope, "decay_factor": self.decay_factor,
            "eta_subadditivity_violations": self.eta_violations,
            "total_subadditivity_violations": self.total_violations,
            "eta_derivative_ratio_max": list(self.eta_deriv_max),
            "total_derivative_ratio_max": list(self.total_deriv_max),
            "derivatives_bounded": self.derivatives_bounded,
            "xi": self.xi.tolist(), "ratio": self.ratio.tolist(),
        }


def check_eta_admissible(ps: ProblemSpec, mode: str = "Little_o", xi_grid=None,
                         pair_samples: int = 100, seed: int = 0) -> EtaReport:
    """Audit eta against the loss weight M: growth ratio, subadditivity, derivative bounds."""
    if mode not in ("Little_o", "Big_O"):
        raise DomainError("mode must be Little_o or Big_O")
    xi = np.geomspace(1e3, 1e8, 21) if xi_grid is None else np.asarray(xi_grid, dtype=float)
    if xi[-1] / xi[0] < 1e4 * (1 - 1e-12):
        raise DomainError("eta audit needs a grid spanning at least four decades")
    M = lambda x: total_weight(ps, x)  # noqa: E731
    eta = ps.eta_at
    Mv = np.array([M(x) for x in xi])
    ev = np.array([eta(x) for x in xi])
    ratio = Mv / ev

    rng = np.random.default_rng(seed)
    mags = np.exp(rng.uniform(math.log(xi[0]), math.log(xi[-1]), (pair_samples, 2)))
    signs = rng.choice([-1.0, 1.0], (pair_samples, 2))
    v_eta = v_tot = 0
    for (a, b), (sa, sb) in zip(mags, signs):
        xa, xb = sa * math.sqrt(a * a - 1), sb * math.sqrt(b * b - 1)
        xs = bracket(xa + xb)
        ba, bb = bracket(xa), bracket(xb)
        if xs <= ps.zones.M_cut:
            continue
        if eta(xs) > (eta(ba) + eta(bb)) * (1 + 1e-12):
            v_eta += 1
        if M(xs) > (M(ba) + M(bb)) * (1 + 1e-12):
            v_tot += 1

    ed = np.array([_log_derivs(eta, x) for x in xi])
    md = np.array([_log_derivs(M, x) for x in xi])
    bounded = all(_bounded_tail(col) for col in (ed[:, 0], ed[:, 1], md[:, 0], md[:, 1]))
    return EtaReport(
        mode=mode, xi=xi, ratio=ratio, trend_slope=loglog_slope(xi, ratio),
        decay_factor=float(ratio[0] / ratio[-1]),
        eta_violations=v_eta, total_violations=v_tot,
        eta_deriv_max=tuple(float(v) for v in np.abs(ed).max(axis=0)),
        total_deriv_max=tuple(float(v) for v in np.abs(md).max(axis=0)),
        derivatives_bounded=bounded,
    )


# classification
@dataclass
class Check:
    name: str
    passed: bool
    evidence: dict

    def to_dict(self):
        return {"name": self.name, "pass": bool(self.passed), "evidence": self.evidence}


@dataclass
class Classification:
    verdict: str
    checks: list

    @property
    def failing(self) -> list:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self):
        return {"verdict": self.verdict, "failing": self.failing,
                "checks": [c.to_dict() for c in self.checks]}


def _guarded(name, fn):
    try:
        passed, evidence = fn()
    except HypwpError as exc:
        return Check(name, False, {"error": str(exc)})
    return Check(name, bool(passed), evidence)


def classify(ps: ProblemSpec, xi_grid=None, pair_samples: int = 100, seed: int = 0) -> Classification:
    """Hypothesis audit: GlobalWellPosed, LocalWellPosed or NotCovered."""
    xi = np.geomspace(1e3, 1e8, 21) if xi_grid is None else np.asarray(xi_grid, dtype=float)
    lw = ps.lw
    s_eff = lw.s if lw.s is not None else math.inf

    def s_range():
        return lw.s_in_range(), {"s": s_eff, "m": lw.m, "minimum": lw.m / (lw.m - 1)}

    def shape():
        rep = check_shape_conditions(lw.shape, s_eff, lw.m)
        return rep.passed, rep.to_dict()

    def decay():
        rep = check_decay_condition(lw)
        return rep.passed, rep.to_dict()

    def sequence():
        rep = check_sequence_inequality(ps.ws, ps.eta_at, ps.eta.delta0, xi)
        return rep.passed, rep.to_dict()

    reports = {}

    def eta_check(mode):
        def run():
            rep = check_eta_admissible(ps, mode, xi, pair_samples, seed)
            reports[mode] = rep
            return rep.trend_pass, rep.to_dict()
        return run

    def eta_sub():
        rep = reports.get("Little_o")
        if rep is None:
            raise DomainError("weight audit unavailable")
        return rep.subadditive, {"eta_violations": rep.eta_violations, "total_violations": rep.total_violations}

    def eta_deriv():
        rep = reports.get("Little_o")
        if rep is None:
            raise DomainError("weight audit unavailable")
        return rep.derivatives_bounded, {"eta": list(rep.eta_deriv_max), "total": list(rep.total_deriv_max)}

    checks = [
        _guarded("s_range", s_range),
        _guarded("shape_condition", shape),
        _guarded("decay_condition", decay),
        _guarded("sequence_inequality", sequence),
        _guarded("eta_little_o", eta_check("Little_o")),
        _guarded("eta_big_O", eta_check("Big_O")),
        _guarded("eta_subadditivity", eta_sub),
        _guarded("eta_derivatives", eta_deriv),
    ]
    by = {c.name: c.passed for c in checks}
    base = all(by[n] for n in ("s_range", "shape_condition", "decay_condition", "sequence_inequality", "eta_subadditivity", "eta_derivatives"))
    if base and by["eta_little_o"]:
        verdict = "GlobalWellPosed"
    elif base and by["eta_big_O"]:
        verdict = "LocalWellPosed"
    else:
        verdict = "NotCovered"
    return Classification(verdict, checks)


def xi_grid(lo: float, hi: float, points: int) -> np.ndarray:
    if not (0 < lo < hi) or points < 2:
        raise DomainError("grid needs 0 < lo < hi and at least two points")
    return np.geomspace(lo, hi, points)


def t_xi_series(lw: LeviWeight, zones: ZonePartition, xi) -> np.ndarray:
    return np.array([t_xi(lw, zones, x).t for x in xi])
