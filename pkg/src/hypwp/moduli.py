"""Moduli of continuity, the frequency weights they generate, and weight sequences.

A modulus mu generates phi(x) = x mu(1/x). The catalog closed forms use
log(1/s) + 1 exactly as in the standard table of moduli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from ._numerics import iterated_logs
from .errors import DomainError, SpecError

MODULUS_KINDS = ("lipschitz", "loglip", "logloglip", "hoelder", "loginverse", "custom")


def _tower(depth: int) -> float:
    """exp applied depth times to 1 (depth 0 gives 1)."""
    v = 1.0
    for _ in range(depth):
        v = math.exp(v)
    return v


def _logloglip_s0(depth: int) -> float:
    """Largest s such that the log-log row is increasing and concave on (0, s].

    Found on a dense geometric grid below the point where the innermost log
    reaches zero, then shrunk by 1% for safety.
    """
    top = 1.0 / _tower(depth - 1)
    s = np.geomspace(top * 1e-12, top * (1 - 1e-9), 4000)
    ell = -np.log(s)
    inner = np.array([iterated_logs(v, depth)[-1] for v in ell])
    mu = s * (ell + 1.0) * inner
    slope = np.diff(mu) / np.diff(s)
    ok_inc = slope > 0
    ok_conc = np.concatenate([[True], np.diff(slope) <= 0])
    ok = ok_inc & ok_conc & (inner[1:] > 0)
    bad = np.flatnonzero(~ok)
    last = s[bad[0]] if bad.size else s[-1]
    return float(last * 0.99)


@dataclass(frozen=True)
class Modulus:
    """A modulus of continuity.

    Kinds and parameters:
      lipschitz                 mu(s) = s
      loglip(power=1)           mu(s) = s (log(1/s) + 1)^power
      logloglip(depth)          mu(s) = s (log(1/s) + 1) log^[depth](1/s)
      hoelder(alpha)            mu(s) = s^alpha
      loginverse(alpha)         mu(s) = (log(1/s) + 1)^(-alpha)
      custom(func)              any callable on [0, 1]
    """

    kind: str
    alpha: Optional[float] = None
    depth: Optional[int] = None
    power: float = 1.0
    func: Optional[Callable[[float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in MODULUS_KINDS:
            raise DomainError(f"unknown modulus kind {self.kind!r}")
        if self.kind == "hoelder" and not (self.alpha is not None and 0 < self.alpha < 1):
            raise DomainError("hoelder modulus needs alpha in (0, 1)")
        if self.kind == "loginverse" and not (self.alpha is not None and self.alpha > 0):
            raise DomainError("loginverse modulus needs alpha > 0")
        if self.kind == "logloglip" and not (self.depth is not None and self.depth >= 1):
            raise DomainError("logloglip modulus needs depth >= 1")
        if self.kind == "loglip" and not self.power > 0:
            raise DomainError("loglip power must be positive")
        if self.kind == "custom" and self.func is None:
            raise DomainError("custom modulus needs a callable")

    @property
    def s0(self) -> float:
        """Right end of the interval on which the closed form is a modulus.

        For the log-type rows the formula stops being increasing or concave
        (or its iterated logs stop being positive) before s = 1.
        """
        if self.kind == "loglip":
            return min(1.0, math.exp(1.0 - self.power))
        if self.kind == "loginverse":
            return min(1.0, math.exp(-self.alpha))
        if self.kind == "logloglip":
            return _logloglip_s0(self.depth)
        return 1.0

    def mu(self, s: float) -> float:
        s = float(s)
        if s < 0:
            raise DomainError("modulus argument must be nonnegative")
        if s == 0.0:
            return 0.0
        k = self.kind
        if k == "lipschitz":
            return s
        if k == "hoelder":
            return s ** self.alpha
        L = -math.log(s) + 1.0
        if k == "loglip":
            return s * L ** self.power
        if k == "loginverse":
            return L ** (-self.alpha)
        if k == "logloglip":
            return s * L * iterated_logs(-math.log(s), self.depth)[-1]
        return float(self.func(s))

    def phi(self, x: float) -> float:
        """Generated weight x mu(1/x), evaluated without forming tiny numbers."""
        k = self.kind
        lx = math.log(x)
        if k == "lipschitz":
            return 1.0
        if k == "hoelder":
            return x ** (1.0 - self.alpha)
        if k == "loglip":
            return (lx + 1.0) ** self.power
        if k == "loginverse":
            return x * (lx + 1.0) ** (-self.alpha)
        if k == "logloglip":
            return (lx + 1.0) * iterated_logs(lx, self.depth)[-1]
        return x * self.mu(1.0 / x)

    def table_phi(self, x: float) -> float:
        """Asymptotic form of the generated weight as listed in the standard table."""
        k = self.kind
        lx = math.log(x)
        if k == "lipschitz":
            return 1.0
        if k == "hoelder":
            return x ** (1.0 - self.alpha)
        if k == "loglip":
            return lx ** self.power
        if k == "loginverse":
            return x * lx ** (-self.alpha)
        if k == "logloglip":
            return lx * iterated_logs(lx, self.depth)[-1]
        raise DomainError("custom moduli have no table form")

    def to_dict(self):
        if self.kind == "custom":
            raise SpecError("custom moduli cannot be serialized")
        d = {"kind": self.kind}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        if self.depth is not None:
            d["depth"] = self.depth
        if self.kind == "loglip":
            d["power"] = self.power
        return d

    @classmethod
    def from_dict(cls, d, path="modulus"):
        from .specio import get_int, get_number

        kind = d.get("kind")
        if kind not in MODULUS_KINDS or kind == "custom":
            raise SpecError(f"unknown modulus kind {kind!r}", f"{path}.kind")
        alpha = get_number(d, "alpha", path) if kind in ("hoelder", "loginverse") else None
        depth = get_int(d, "depth", path) if kind == "logloglip" else None
        power = get_number(d, "power", path, default=1.0) if kind == "loglip" else 1.0
        return cls(kind, alpha=alpha, depth=depth, power=power)


def phi_of(mu: Modulus, x: float) -> float:
    if x < 2:
        raise DomainError("phi_of is used for x >= 2 only")
    return mu.phi(x)


@dataclass
class ModulusCheck:
    s0: float
    increasing: bool
    concave: bool
    subadditive_violations: int
    samples: int

    @property
    def passed(self):
        return self.increasing and self.concave and self.subadditive_violations == 0

    def to_dict(self):
        return {"pass": self.passed, "s0": self.s0, "increasing": self.increasing,
                "concave": self.concave, "subadditive_violations": self.subadditive_violations,
                "samples": self.samples}


def check_modulus(mu: Modulus, n: int = 400, seed: int = 0) -> ModulusCheck:
    """Sampled audit of monotonicity, midpoint concavity and subadditivity on (0, s0]."""
    s0 = mu.s0
    s = np.concatenate([np.geomspace(s0 * 1e-12, s0, n // 2), np.linspace(s0 / n, s0, n // 2)])
    s = np.unique(s)
    v = np.array([mu.mu(x) for x in s])
    increasing = bool(np.all(np.diff(v) >= -1e-12 * np.abs(v[1:])) and mu.mu(0.0) == 0.0)
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, s0, n)
    b = rng.uniform(0, s0, n)
    mid = np.array([mu.mu((x + y) / 2) for x, y in zip(a, b)])
    avg = np.array([(mu.mu(x) + mu.mu(y)) / 2 for x, y in zip(a, b)])
    concave = bool(np.all(mid >= avg - 1e-12))
    a2, b2 = a / 2, b / 2
    viol = sum(mu.mu(x + y) > mu.mu(x) + mu.mu(y) + 1e-12 for x, y in zip(a2, b2))
    return ModulusCheck(s0, increasing, concave, int(viol), n)


# weight sequences
SEQUENCE_KINDS = ("gevrey", "logfactorial", "custom")


@dataclass(frozen=True)
class WeightSequence:
    """Positive increasing sequence K_p, p = 0, 1, ..., handled through log K_p."""

    kind: str
    s_star: float = 1.0
    A: float = 1.0
    P_max: int = 400
    log_func: Optional[Callable[[int], float]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in SEQUENCE_KINDS:
            raise DomainError(f"unknown weight sequence kind {self.kind!r}")
        if self.kind == "gevrey" and not (self.s_star >= 1 and self.A > 0):
            raise DomainError("gevrey sequence needs s_star >= 1 and A > 0")
        if self.kind == "custom" and self.log_func is None:
            raise DomainError("custom sequence needs a callable p -> log K_p")
        if self.P_max < 1:
            raise DomainError("P_max must be >= 1")

    def log_K(self, p=None) -> np.ndarray:
        p = np.arange(self.P_max + 1) if p is None else np.asarray(p)
        if self.kind == "gevrey":
            return self.s_star * gammaln(p + 1.0) + p * math.log(self.A)
        if self.kind == "logfactorial":
            return p * np.log((p + 1.0) * np.log(math.e + p))
        return np.array([float(self.log_func(int(q))) for q in np.atleast_1d(p)])

    def to_dict(self):
        if self.kind == "custom":
            raise SpecError("custom sequences cannot be serialized")
        d = {"kind": self.kind, "P_max": self.P_max}
        if self.kind == "gevrey":
            d.update(s_star=self.s_star, A=self.A)
        return d

    @classmethod
    def from_dict(cls, d, path="weight_sequence"):
        from .specio import get_int, get_number

        kind = d.get("kind")
        if kind not in ("gevrey", "logfactorial"):
            raise SpecError(f"unknown weight sequence kind {kind!r}", f"{path}.kind")
        P_max = get_int(d, "P_max", path, default=400)
        if kind == "gevrey":
            return cls(kind, s_star=get_number(d, "s_star", path), A=get_number(d, "A", path, default=1.0),
                       P_max=P_max)
        return cls(kind, P_max=P_max)


@dataclass
class SequenceInequalityReport:
    xi: np.ndarray
    slack: np.ndarray
    argmin: np.ndarray
    P_max: int
    delta0: float

    @property
    def inconclusive(self) -> bool:
        return bool(np.any(self.argmin >= self.P_max))

    @property
    def max_slack(self) -> float:
        return float(self.slack.max())

    @property
    def bounded(self) -> bool:
        """No growth: the largest slack over the last third stays below the largest over the first third."""
        n = len(self.slack)
        k = max(1, n // 3)
        return bool(self.slack[-k:].max() <= self.slack[:k].max() + 1e-9 * (1 + abs(self.slack[:k].max())))

    @property
    def passed(self) -> bool:
        return self.bounded and not self.inconclusive

    def to_dict(self):
        return {
            "pass": self.passed, "inconclusive": self.inconclusive, "max_slack": self.max_slack,
            "delta0": self.delta0, "P_max": self.P_max,
            "xi": self.xi.tolist(), "slack": self.slack.tolist(), "argmin": self.argmin.tolist(),
        }


def log_inf_ratio(ws: WeightSequence, x: float):
    """(min_p log(K_p / x^p), argmin) over p = 0..P_max."""
    p = np.arange(ws.P_max + 1)
    vals = ws.log_K(p) - p * math.log(x)
    i = int(np.argmin(vals))
    return float(vals[i]), i


def check_sequence_inequality(ws: WeightSequence, eta, delta0: float, xi_grid) -> SequenceInequalityReport:
    """Slack log inf_p K_p x^-p + delta0 eta(x) on a grid; bounded above means pass."""
    xi = np.asarray(xi_grid, dtype=float)
    slack = np.empty_like(xi)
    arg = np.empty(xi.shape, dtype=int)
    for i, x in enumerate(xi):
        v, k = log_inf_ratio(ws, x)
        slack[i] = v + delta0 * eta(x)
        arg[i] = k
    return SequenceInequalityReport(xi, slack, arg, ws.P_max, delta0)
