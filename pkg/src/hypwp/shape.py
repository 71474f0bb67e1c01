"""Degeneracy profiles lambda(t) and their primitives Lambda(t).

A shape function vanishes at t = 0 and is positive on (0, T]. Three kinds
are supported: ``monomial`` (t^l), ``exponential_flat`` (exp(-t^-r)) and
``custom`` (user callables). Everything that may underflow is also
available in log form so that callers can work at t = 1e-300 and below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalError, SpecError

KINDS = ("monomial", "exponential_flat", "custom")


@dataclass(frozen=True)
class ShapeFunction:
    kind: str
    T: float = 1.0
    l: Optional[float] = None
    r: Optional[float] = None
    lam_fn: Optional[Callable[[float], float]] = field(default=None, compare=False)
    Lam_fn: Optional[Callable[[float], float]] = field(default=None, compare=False)
    dlam_fn: Optional[Callable[[float], float]] = field(default=None, compare=False)
    rtol: float = 1e-12

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown shape kind {self.kind!r}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise DomainError("T must be a positive finite number")
        if self.kind == "monomial" and not (self.l is not None and self.l > 0):
            raise DomainError("monomial shape needs l > 0")
        if self.kind == "exponential_flat" and not (self.r is not None and self.r > 0):
            raise DomainError("exponential_flat shape needs r > 0")
        if self.kind == "custom" and self.lam_fn is None:
            raise DomainError("custom shape needs a lambda callable")

    # constructors
    @classmethod
    def monomial(cls, l: float, T: float = 1.0) -> "ShapeFunction":
        return cls("monomial", T=T, l=float(l))

    @classmethod
    def exponential_flat(cls, r: float, T: float = 1.0, rtol: float = 1e-12) -> "ShapeFunction":
        return cls("exponential_flat", T=T, r=float(r), rtol=rtol)

    @classmethod
    def custom(cls, lam, T: float = 1.0, Lam=None, dlam=None, rtol: float = 1e-12) -> "ShapeFunction":
        return cls("custom", T=T, lam_fn=lam, Lam_fn=Lam, dlam_fn=dlam, rtol=rtol)

    # serialization
    def to_dict(self) -> dict:
        if self.kind == "custom":
            raise SpecError("custom shapes cannot be serialized")
        d = {"kind": self.kind}
        if self.kind == "monomial":
            d["l"] = self.l
        else:
            d["r"] = self.r
        d["T"] = self.T
        return d

    @classmethod
    def from_dict(cls, d: dict, path: str = "shape") -> "ShapeFunction":
        from .specio import get_number  # local import keeps module graph acyclic

        kind = d.get("kind")
        T = get_number(d, "T", path, default=1.0, positive=True)
        if kind == "monomial":
            return cls.monomial(get_number(d, "l", path, positive=True), T)
        if kind == "exponential_flat":
            return cls.exponential_flat(get_number(d, "r", path, positive=True), T)
        raise SpecError(f"unknown shape kind {kind!r}", f"{path}.kind")

    # domain
    def _check_t(self, t: float) -> float:
        t = float(t)
        if not (0.0 <= t <= self.T * (1 + 1e-15)):
            raise DomainError(f"t={t!r} outside [0, {self.T}]")
        return min(t, self.T)

    # lambda and derivatives
    def lam(self, t: float) -> float:
        t = self._check_t(t)
        if t == 0.0:
            return 0.0
        if self.kind == "monomial":
            return t ** self.l
        if self.kind == "exponential_flat":
            return math.exp(-(t ** -self.r))
        return float(self.lam_fn(t))

    def log_lam(self, t: float) -> float:
        """log lambda(t), finite for every t > 0 of the closed-form kinds."""
        t = self._check_t(t)
        if t == 0.0:
            return -math.inf
        return self.log_lam_u(math.log(t))

    def log_lam_u(self, u: float) -> float:
        """log lambda(e^u); u may be far below the float range of t."""
        if self.kind == "monomial":
            return self.l * u
        if self.kind == "exponential_flat":
            return -math.exp(-self.r * u) if -self.r * u < 700.0 else -math.inf
        v = self.lam(math.exp(u))
        if v <= 0:
            return -math.inf
        return math.log(v)

    def dlam(self, t: float) -> float:
        t = self._check_t(t)
        if self.kind == "monomial":
            return self.l * t ** (self.l - 1) if t > 0 else (0.0 if self.l > 1 else math.inf)
        if self.kind == "exponential_flat":
            if t == 0.0:
                return 0.0
            return self.r * t ** (-self.r - 1) * self.lam(t)
        if self.dlam_fn is not None:
            return float(self.dlam_fn(t))
        h = max(t, 1e-300) * 1e-6
        return (float(self.lam_fn(t + h)) - float(self.lam_fn(max(t - h, 0.0)))) / (t + h - max(t - h, 0.0))

    def log_derivative(self, t: float) -> float:
        """lambda'(t)/lambda(t) for t > 0."""
        t = self._check_t(t)
        if t == 0.0:
            raise DomainError("log-derivative of lambda undefined at t=0")
        if self.kind == "monomial":
            return self.l / t
        if self.kind == "exponential_flat":
            return self.r * t ** (-self.r - 1)
        lam = self.lam(t)
        if lam <= 0:
            raise DomainError(f"lambda vanishes at t={t!r}")
        return self.dlam(t) / lam

    def d2lam(self, t: float) -> float:
        t = self._check_t(t)
        if self.kind == "monomial":
            l = self.l
            return l * (l - 1) * t ** (l - 2) if t > 0 else 0.0
        if self.kind == "exponential_flat":
            r = self.r
            if t == 0.0:
                return 0.0
            g = r * t ** (-r - 1)
            return self.lam(t) * (g * g - r * (r + 1) * t ** (-r - 2))
        h = t * 1e-4
        lo = max(t - h, 0.0)
        hi = min(t + h, self.T)
        return (self.dlam(hi) - self.dlam(lo)) / (hi - lo)

    def d2lam_over_lam(self, t: float) -> float:
        """lambda''(t)/lambda(t) for t > 0, without forming lambda itself."""
        t = self._check_t(t)
        if t == 0.0:
            raise DomainError("lambda''/lambda undefined at t=0")
        if self.kind == "monomial":
            return self.l * (self.l - 1) / (t * t)
        if self.kind == "exponential_flat":
            r = self.r
            g = r * t ** (-r - 1)
            return g * g - r * (r + 1) * t ** (-r - 2)
        return self.d2lam(t) / self.lam(t)

    # primitive
    def Lam(self, t: float) -> float:
        t = self._check_t(t)
        if t == 0.0:
            return 0.0
        if self.kind == "monomial":
            return t ** (self.l + 1) / (self.l + 1)
        if self.kind == "custom" and self.Lam_fn is not None:
            return float(self.Lam_fn(t))
        return math.exp(self.log_Lam(t))

    def log_Lam(self, t: float) -> float:
        t = self._check_t(t)
        if t == 0.0:
            return -math.inf
        return self.log_Lam_u(math.log(t))

    def log_Lam_u(self, u: float) -> float:
        """log Lambda(e^u)."""
        if self.kind == "monomial":
            return (self.l + 1) * u - math.log(self.l + 1)
        if self.kind == "exponential_flat":
            return self._log_Lam_flat(u)
        if self.Lam_fn is not None:
            v = float(self.Lam_fn(math.exp(u)))
            return math.log(v) if v > 0 else -math.inf
        return self._log_Lam_quad(u)

    def _log_Lam_flat(self, u: float) -> float:
        # Lambda(t) = (1/r) int_V^inf e^-v v^(-1/r-1) dv with V = t^-r.
        # Shifting v = V + y leaves a smooth, exponentially weighted integrand:
        #   Lambda = (1/r) e^-V int_0^inf e^-y (V + y)^(-1/r-1) dy.
        r = self.r
        if -r * u >= 700.0:
            return -math.inf
        V = math.exp(-r * u)
        p = 1.0 / r + 1.0
        val, err = integrate.quad(
            lambda y: math.exp(-y) * (1.0 + y / V) ** (-p), 0.0, math.inf,
            epsabs=0.0, epsrel=self.rtol, limit=200,
        )
        if not (val > 0) or err > 10 * self.rtol * val:
            raise NumericalError("Lambda quadrature did not converge", achieved=err / max(val, 1e-300))
        return -V - math.log(r) - p * math.log(V) + math.log(val)

    def _log_Lam_quad(self, u: float) -> float:
        # Lambda(t) = int_{-inf}^{log t} lambda(e^v) e^v dv, scaled by the endpoint value
        log_ref = self.log_lam_u(u) + u
        if not math.isfinite(log_ref):
            return -math.inf

        def f(v):
            lv = self.log_lam_u(v)
            return math.exp(lv + v - log_ref) if math.isfinite(lv) else 0.0

        val, err = integrate.quad(f, -math.inf, u, epsabs=0.0, epsrel=self.rtol, limit=400)
        if not (val > 0) or err > 10 * self.rtol * val:
            raise NumericalError("Lambda quadrature did not converge", achieved=err / max(val, 1e-300))
        return log_ref + math.log(val)

    def lam_over_Lam(self, t: float) -> float:
        """lambda(t)/Lambda(t), computed in log space."""
        return math.exp(self.log_lam(t) - self.log_Lam(t))


def eval_lambda(shape: ShapeFunction, t: float) -> float:
    return shape.lam(t)


def eval_Lambda(shape: ShapeFunction, t: float) -> float:
    return shape.Lam(t)


@dataclass
class ShapeReport:
    s: float
    m: int
    grid: np.ndarray
    ratios: np.ndarray
    c0: float
    c: float
    threshold: float
    passed: bool
    second_derivative_ratio: float
    note: str = "derivative bounds checked for k <= 2 only"

    def to_dict(self) -> dict:
        return {
            "s": self.s, "m": self.m, "c0": self.c0, "c": self.c,
            "threshold": self.threshold, "pass": self.passed,
            "second_derivative_ratio": self.second_derivative_ratio,
            "grid_min": float(self.grid.min()), "grid_max": float(self.grid.max()),
            "grid_points": int(self.grid.size), "note": self.note,
        }


def shape_ratio(shape: ShapeFunction, t: float) -> float:
    """(lambda'/lambda) / (lambda/Lambda)."""
    return shape.log_derivative(t) * math.exp(shape.log_Lam(t) - shape.log_lam(t))


def check_shape_conditions(shape: ShapeFunction, s: float, m: int, grid=None) -> ShapeReport:
    """Empirical constants of the shape condition on a grid in (0, T].

    The pass flag requires c0 > s(m-1)/((s-1)m); for s = inf the threshold
    is (m-1)/m.
    """
    if grid is None:
        grid = np.geomspace(shape.T * 1e-3, shape.T, 100)
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid > shape.T):
        raise DomainError("grid must lie in (0, T]")
    ratios = np.empty_like(grid)
    second = np.empty_like(grid)
    for i, t in enumerate(grid):
        if shape.log_lam(t) == -math.inf:
            raise DomainError(f"lambda vanishes at grid point t={t!r}")
        ratios[i] = shape_ratio(shape, t)
        ld = shape.log_derivative(t)
        # |lambda''| / ((lambda'/lambda)|lambda'|) = |lambda''/lambda| / (lambda'/lambda)^2
        second[i] = abs(shape.d2lam_over_lam(t)) / (ld * ld)
    threshold = (m - 1) / m if math.isinf(s) else s * (m - 1) / ((s - 1) * m)
    c0 = float(ratios.min())
    return ShapeReport(
        s=s, m=m, grid=grid, ratios=ratios, c0=c0, c=float(ratios.max()),
        threshold=threshold, passed=bool(c0 > threshold),
        second_derivative_ratio=float(np.nanmax(second)) if np.any(np.isfinite(second)) else math.nan,
    )
