"""Levi weight w(Lambda), its companion W, the symbol rho and the zone boundary.

The weight family is

    w(Lambda)^m = Lambda^(-a) * (log^[m~](1/Lambda))^beta~,   a = s/(s-1),

with a = 1 for s = inf. Every quantity is computed as a function of
ell = log Lambda, so nothing underflows even when Lambda(t) is far below
the double range. A custom weight can be supplied as a callable
ell -> log w^m.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from ._numerics import bracket, iterated_logs, loglog_slope
from .errors import DomainError, NumericalError, SpecError
from .shape import ShapeFunction


@dataclass(frozen=True)
class ZonePartition:
    """Zone constant N and low-frequency cutoff M_cut."""

    N: float = 1.0
    M_cut: float = 2.0

    def __post_init__(self):
        if not self.N > 0:
            raise DomainError("zone constant N must be positive")
        if not self.M_cut >= 1:
            raise DomainError("M_cut must be >= 1")

    def to_dict(self):
        return {"N": self.N, "M_cut": self.M_cut}


@dataclass(frozen=True)
class LeviWeight:
    m: int
    s: Optional[float]
    shape: ShapeFunction
    m_tilde: int = 0
    beta_tilde: float = 0.0
    custom_log_wm: Optional[Callable[[float], float]] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise DomainError("order m must be an integer >= 2")
        if self.custom_log_wm is None:
            if self.s is None or not self.s > 1:
                raise DomainError("Gevrey parameter s must exceed 1")
            if self.m_tilde < 0:
                raise DomainError("m_tilde must be nonnegative")
            if self.beta_tilde != 0 and self.m_tilde < 1:
                raise DomainError("beta_tilde != 0 needs m_tilde >= 1")

    @classmethod
    def custom(cls, m, shape, log_wm, s=None, name="custom"):
        """Weight given by a callable ell -> log w(e^ell)^m."""
        return cls(m=m, s=s, shape=shape, custom_log_wm=log_wm, name=name)

    # parameters
    @property
    def a(self) -> Optional[float]:
        """Power of 1/Lambda in w^m (None for a custom weight)."""
        if self.custom_log_wm is not None:
            return None
        return 1.0 if math.isinf(self.s) else self.s / (self.s - 1.0)

    def s_in_range(self) -> bool:
        """Whether s >= m/(m-1), the range of the weight family."""
        if self.s is None:
            return True
        return math.isinf(self.s) or self.s >= self.m / (self.m - 1)

    def to_dict(self):
        if self.custom_log_wm is not None:
            raise SpecError("custom Levi weights cannot be serialized")
        return {"m": self.m, "s": self.s, "m_tilde": self.m_tilde, "beta_tilde": self.beta_tilde}

    # weight as a function of ell = log Lambda
    def log_wm_ell(self, ell: float) -> float:
        if self.custom_log_wm is not None:
            return float(self.custom_log_wm(ell))
        val = -self.a * ell
        if self.beta_tilde != 0.0:
            logs = iterated_logs(-ell, self.m_tilde)
            if logs[-1] <= 0.0:
                raise DomainError(
                    f"iterated log undefined at level {self.m_tilde + 1}: "
                    f"log^[{self.m_tilde}](1/Lambda) = {logs[-1]!r} <= 0"
                )
            val += self.beta_tilde * math.log(logs[-1])
        return val

    def dlog_wm_dell(self, ell: float) -> float:
        """d log(w^m) / d log Lambda."""
        if self.custom_log_wm is not None:
            h = 1e-5 * max(1.0, abs(ell))
            return (self.log_wm_ell(ell + h) - self.log_wm_ell(ell - h)) / (2 * h)
        val = -self.a
        if self.beta_tilde != 0.0:
            logs = iterated_logs(-ell, self.m_tilde)
            val -= self.beta_tilde / math.prod(logs)
        return val

    def _decay_rate(self, ell: float, q: float) -> float:
        """Asymptotic rate c in exp(q log w^m + ell) ~ e^(c ell) as ell -> -inf."""
        if self.custom_log_wm is None:
            return 1.0 - q * self.a
        far = ell - 200.0
        return 1.0 + q * self.dlog_wm_dell(far)

    def log_primitive_ell(self, ell: float, q: float) -> float:
        """log of int_0^Lambda w(L)^(m q) dL with Lambda = e^ell.

        The integral is taken in v = log L, scaled by its value at the
        upper end so that it never overflows.
        """
        c = self._decay_rate(ell, q)
        if not c > 0:
            raise DomainError(
                f"integral of w^{self.m * q:g} diverges at Lambda=0 (decay rate {c:g}); "
                "requires s > m/(m-1)"
            )
        if self.custom_log_wm is None and self.beta_tilde == 0.0:
            return c * ell - math.log(c)
        g0 = q * self.log_wm_ell(ell) + ell

        def f(y):
            return math.exp(q * self.log_wm_ell(ell + y) + ell + y - g0)

        span = 60.0 / c + 60.0
        val, err = integrate.quad(f, -span, 0.0, epsabs=0.0, epsrel=1e-13, limit=400,
                                  points=[-1.0 / c, -10.0 / c])
        if not val > 0 or err > 1e-10 * val:
            raise NumericalError("weight primitive quadrature did not converge",
                                 achieved=err / max(val, 1e-300))
        return g0 + math.log(val)

    def log_W_ell(self, ell: float) -> float:
        """log W(Lambda) with W(Lambda) = int_0^Lambda w(L) dL."""
        return self.log_primitive_ell(ell, 1.0 / self.m)

    # weight as a function of t
    def log_Lambda(self, t: float) -> float:
        return self.shape.log_Lam(t)

    def log_wm(self, t: float) -> float:
        return self.log_wm_ell(self.shape.log_Lam(t))

    def dlogw_dt(self, t: float) -> float:
        """d log w(Lambda(t)) / dt."""
        ell = self.shape.log_Lam(t)
        return self.dlog_wm_dell(ell) / self.m * math.exp(self.shape.log_lam(t) - ell)

    @functools.cached_property
    def decay_condition(self) -> "DecayConditionReport":
        return check_decay_condition(self)


def w_of(lw: LeviWeight, t: float) -> float:
    """w(Lambda(t)) for t in (0, T]."""
    if t <= 0:
        raise DomainError("w is defined for t > 0 only")
    return math.exp(lw.log_wm(t) / lw.m)


def W_of(lw: LeviWeight, t: float) -> float:
    """W(Lambda(t)) = int_0^t lambda(r) w(Lambda(r)) dr."""
    if t == 0:
        return 0.0
    return math.exp(lw.log_W_ell(lw.shape.log_Lam(t)))


# zone boundary
@dataclass(frozen=True)
class TXi:
    t: float
    clamped: bool
    residual: float
    log_Lambda: float


def t_xi(lw: LeviWeight, zones: ZonePartition, xi_mag: float) -> TXi:
    """Time where N w(Lambda(t))^m = <xi>, by bisection.

    Returns T with ``clamped=True`` when <xi> <= N w(Lambda(T))^m.
    """
    T = lw.shape.T
    log_target = math.log(xi_mag) - math.log(zones.N)

    def excess(t):
        return lw.log_wm(t) - log_target

    if excess(T) >= 0.0:
        ell = lw.shape.log_Lam(T)
        return TXi(T, True, abs(math.expm1(excess(T))), ell)
    lo, hi = 0.0, T
    tol = 1e-14 * T
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    ell = lw.shape.log_Lam(t)
    return TXi(t, False, abs(math.expm1(lw.log_wm_ell(ell) - log_target)), ell)


def levi_part(lw: LeviWeight, zones: ZonePartition, xi_mag: float) -> float:
    """W(Lambda(t_xi)) * w(Lambda(t_xi))^(m-1)."""
    ell = t_xi(lw, zones, xi_mag).log_Lambda
    return math.exp(lw.log_W_ell(ell) + (lw.m - 1) / lw.m * lw.log_wm_ell(ell))


# rho
def log_levi_product(lw: LeviWeight, t: float) -> float:
    """log of lambda(t)^m w(Lambda(t))^(m(m-1))."""
    return lw.m * lw.shape.log_lam(t) + (lw.m - 1) * lw.log_wm(t)


def _log1p_exp(x: float) -> float:
    if x > 35.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def log_rho(lw: LeviWeight, t: float, xi_mag: float) -> float:
    if t == 0.0:
        if not lw.decay_condition.passed:
            raise DomainError("rho(0, xi) undefined: the decay condition fails for this weight")
        return 0.0
    return _log1p_exp(math.log(xi_mag) + log_levi_product(lw, t)) / lw.m


def rho(lw: LeviWeight, t: float, xi_mag: float) -> float:
    """Positive m-th root of 1 + <xi> lambda^m w^(m(m-1))."""
    return math.exp(log_rho(lw, t, xi_mag))


def drho_over_rho(lw: LeviWeight, t: float, xi_mag: float) -> float:
    """Analytic d_t rho / rho for t > 0."""
    m = lw.m
    logP = math.log(xi_mag) + log_levi_product(lw, t)
    frac = 1.0 / (1.0 + math.exp(-logP)) if logP > -700 else math.exp(logP)
    sh = lw.shape
    ell = sh.log_Lam(t)
    dlogP = m * sh.log_derivative(t) + (m - 1) * lw.dlog_wm_dell(ell) * math.exp(sh.log_lam(t) - ell)
    return frac * dlogP / m


def zone_of(lw: LeviWeight, zones: ZonePartition, t: float, xi_mag: float) -> str:
    """One of "BelowCutoff", "Pd", "Overlap2N", "Hyp"."""
    if xi_mag <= zones.M_cut:
        return "BelowCutoff"
    if t == 0.0:
        return "Pd"
    bound = zones.N * math.exp(lw.log_wm(t))
    if xi_mag <= bound:
        return "Pd"
    if xi_mag >= 2.0 * bound:
        return "Hyp"
    return "Overlap2N"


# decay of lambda^m w^(m(m-1)) at t = 0
@dataclass
class DecayConditionReport:
    passed: bool
    log_t: np.ndarray
    log_products: np.ndarray
    log_drop: float

    def to_dict(self):
        return {"pass": self.passed, "log_drop": self.log_drop,
                "log_t_min": float(self.log_t.min()), "log_t_max": float(self.log_t.max()),
                "points": int(self.log_t.size)}


def default_decay_log_grid(shape: ShapeFunction) -> np.ndarray:
    top = math.log(shape.T / 2)
    if shape.kind == "monomial":
        return np.linspace(top, top - 2000.0, 401)
    if shape.kind == "exponential_flat":
        return np.log(np.geomspace(shape.T / 2, shape.T / 2 * 1e-2, 200))
    return np.log(np.geomspace(shape.T / 2, 1e-300, 301))


def check_decay_condition(lw: LeviWeight, t_grid=None, log_t_grid=None) -> DecayConditionReport:
    """Does lambda^m w^(m(m-1)) decay to 0 as t -> 0+ ?

    True iff the sampled product decreases monotonically along the grid and
    ends below 1e-6 of its value at T/2. The grid is given either in t or
    in log t (the latter reaches far below the float range).
    """
    if log_t_grid is None:
        log_t_grid = default_decay_log_grid(lw.shape) if t_grid is None else np.log(np.asarray(t_grid, float))
    log_t_grid = np.asarray(log_t_grid, dtype=float)
    sh = lw.shape
    vals = np.array([lw.m * sh.log_lam_u(u) + (lw.m - 1) * lw.log_wm_ell(sh.log_Lam_u(u)) for u in log_t_grid])
    ref = lw.m * sh.log_lam_u(math.log(sh.T / 2)) + (lw.m - 1) * lw.log_wm_ell(sh.log_Lam_u(math.log(sh.T / 2)))
    drop = float(vals[-1] - ref)
    monotone = bool(np.all(np.diff(vals) < 0))
    return DecayConditionReport(monotone and drop < math.log(1e-6), log_t_grid, vals, drop)


# weight integral and decay checks
@dataclass
class WeightIntegralReport:
    xi: np.ndarray
    first_ratio: np.ndarray
    second_ratio: np.ndarray
    first_slope: float
    second_slope: float
    t_grid: np.ndarray
    decay_ratio: np.ndarray
    small_lambda_min: float
    slope_tol: float = 0.05

    @property
    def iii_pass(self) -> bool:
        ok = np.all(np.isfinite(self.first_ratio)) and np.all(np.isfinite(self.second_ratio))
        return bool(ok and abs(self.first_slope) <= self.slope_tol and abs(self.second_slope) <= self.slope_tol)

    @property
    def ii_max(self) -> float:
        return float(self.decay_ratio.max())

    @property
    def ii_positive(self) -> bool:
        return bool(np.all(self.decay_ratio > 0) and np.all(np.isfinite(self.decay_ratio)))

    @property
    def ii_literal_pass(self) -> bool:
        """0 < -w' m Lambda/(lambda w) <= 1 at every sampled t."""
        return self.ii_positive and self.ii_max <= 1.0

    @property
    def i_pass(self) -> bool:
        return bool(self.small_lambda_min >= 1.0)

    @property
    def passed(self) -> bool:
        return self.i_pass and self.ii_literal_pass and self.iii_pass

    @property
    def passed_empirical_constant(self) -> bool:
        """Same checks with the constant in (ii) taken from the data."""
        return self.i_pass and self.ii_positive and self.iii_pass

    def to_dict(self):
        return {
            "pass": self.passed,
            "pass_with_empirical_constant": self.passed_empirical_constant,
            "i_min_wm_Lambda": self.small_lambda_min, "i_pass": self.i_pass,
            "ii_max_ratio": self.ii_max, "ii_literal_pass": self.ii_literal_pass,
            "ii_positive": self.ii_positive,
            "iii_first_max": float(self.first_ratio.max()), "iii_second_max": float(self.second_ratio.max()),
            "iii_first_slope": self.first_slope, "iii_second_slope": self.second_slope,
            "iii_pass": self.iii_pass,
        }


def weight_integrals(lw: LeviWeight, zones: ZonePartition, xi_mag: float):
    """Return (first integral, second integral, bound) for one frequency.

    first  = int_0^t_xi <xi>^(1/m) lambda w^(m-1) dt
    second = int_t_xi^T lambda w^m dt
    bound  = W(Lambda(t_xi)) w(Lambda(t_xi))^(m-1)
    With d Lambda = lambda dt all three are integrals in Lambda.
    """
    m = lw.m
    ell = t_xi(lw, zones, xi_mag).log_Lambda
    log_bound = lw.log_W_ell(ell) + (m - 1) / m * lw.log_wm_ell(ell)
    first = math.exp(math.log(xi_mag) / m + lw.log_primitive_ell(ell, (m - 1) / m))
    ell_T = lw.shape.log_Lam(lw.shape.T)
    g0 = lw.log_wm_ell(ell) + ell
    if ell_T > ell:
        val, err = integrate.quad(lambda v: math.exp(lw.log_wm_ell(v) + v - g0), ell, ell_T,
                                  epsabs=0.0, epsrel=1e-12, limit=200)
        second = val * math.exp(g0)
    else:
        second = 0.0
    return first, second, math.exp(log_bound)


def verify_weight_integrals(lw: LeviWeight, zones: ZonePartition, xi_grid, t_grid=None,
                  slope_tol: float = 0.05) -> WeightIntegralReport:
    xi = np.asarray(xi_grid, dtype=float)
    if np.any(xi <= zones.M_cut):
        raise DomainError("xi grid must lie above M_cut")
    r1 = np.empty_like(xi)
    r2 = np.empty_like(xi)
    for i, x in enumerate(xi):
        f, g, b = weight_integrals(lw, zones, x)
        r1[i], r2[i] = f / b, g / b
    T = lw.shape.T
    if t_grid is None:
        t_grid = np.geomspace(T * 1e-3, T * (1 - 1e-5), 60)
    t_grid = np.asarray(t_grid, dtype=float)
    ratios = np.empty_like(t_grid)
    for i, t in enumerate(t_grid):
        h = t * 1e-6
        dlogw = (lw.log_wm(t + h) - lw.log_wm(t - h)) / (2 * h) / lw.m
        ratios[i] = -dlogw * lw.m / lw.shape.lam_over_Lam(t)
    small = [math.exp(lw.log_wm(t) + lw.shape.log_Lam(t)) for t in t_grid if lw.shape.log_Lam(t) <= math.log(1e-2)]
    return WeightIntegralReport(
        xi=xi, first_ratio=r1, second_ratio=r2,
        first_slope=loglog_slope(xi, r1), second_slope=loglog_slope(xi, r2),
        t_grid=t_grid, decay_ratio=ratios,
        small_lambda_min=float(min(small)) if small else math.inf,
        slope_tol=slope_tol,
    )


# rho monotonicity and growth checks
@dataclass
class RhoReport:
    min_log_derivative: float
    max_bound_ratio: float
    points: int
    monotone_tol: float = 1e-12
    ratio_tol: float = 1e-6

    @property
    def monotone_pass(self) -> bool:
        return self.min_log_derivative >= -self.monotone_tol

    @property
    def bound_pass(self) -> bool:
        return self.max_bound_ratio <= 1.0 + self.ratio_tol

    @property
    def passed(self) -> bool:
        return self.monotone_pass and self.bound_pass

    def to_dict(self):
        return {"pass": self.passed, "min_drho_over_rho": self.min_log_derivative,
                "max_bound_ratio": self.max_bound_ratio, "points": self.points}


def verify_rho_bounds(lw: LeviWeight, t_grid, xi_grid) -> RhoReport:
    """Finite-difference audit of d_t rho >= 0 and d_t rho/rho <= lambda^m (lambda/Lambda) w^(m(m-1)) <xi>.

    d_t rho / rho is the central difference of log rho (step t*1e-6), which
    is far less sensitive to rounding than differencing rho itself.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    lo, hi = math.inf, -math.inf
    for x in np.asarray(xi_grid, dtype=float):
        for t in t_grid:
            h = t * 1e-6
            if t + h > lw.shape.T:
                d = (log_rho(lw, t, x) - log_rho(lw, t - 2 * h, x)) / (2 * h)
            else:
                d = (log_rho(lw, t + h, x) - log_rho(lw, t - h, x)) / (2 * h)
            lo = min(lo, d)
            bound = math.exp(math.log(x) + log_levi_product(lw, t)) * lw.shape.lam_over_Lam(t)
            hi = max(hi, d / bound)
    return RhoReport(lo, hi, int(t_grid.size * np.size(xi_grid)))


# tabulation
ZONE_COLUMNS = ("xi", "t_xi", "Lambda_t_xi", "w_at_t_xi", "W_at_t_xi", "rho_boundary")


def zone_table(lw: LeviWeight, zones: ZonePartition, xi_grid) -> list[tuple]:
    rows = []
    for x in sorted(float(v) for v in xi_grid):
        tx = t_xi(lw, zones, x)
        ell = tx.log_Lambda
        rows.append((x, tx.t, math.exp(ell), math.exp(lw.log_wm_ell(ell) / lw.m),
                     math.exp(lw.log_W_ell(ell)), rho(lw, tx.t, x)))
    return rows


def xi_from_bracket(xi_mag: float) -> float:
    """Inverse of the Japanese bracket on [1, inf)."""
    return math.sqrt(max(xi_mag * xi_mag - 1.0, 0.0))


__all__ = [
    "ZonePartition", "LeviWeight", "TXi", "w_of", "W_of", "t_xi", "levi_part", "rho", "log_rho",
    "drho_over_rho", "zone_of", "check_decay_condition", "DecayConditionReport", "verify_weight_integrals", "WeightIntegralReport",
    "verify_rho_bounds", "RhoReport", "zone_table", "ZONE_COLUMNS", "bracket",
]
