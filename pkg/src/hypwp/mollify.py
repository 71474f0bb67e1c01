"""Time coefficients, their mollification by a scaled kernel, and the two mollifier estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from ._numerics import gauss_legendre, loglog_slope
from .errors import DomainError, SpecError
from .moduli import Modulus

EXTENSIONS = ("reflect", "constant")


def _bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


@dataclass(frozen=True)
class MollifierKernel:
    """Nonnegative kernel supported in [-1, 1] with unit mass."""

    psi: Callable = _bump
    name: str = "bump"
    norm: float = field(default=0.0)

    def __post_init__(self):
        if self.norm == 0.0:
            mass, _ = integrate.quad(lambda u: float(self.psi(np.array([u]))[0]), -1.0, 1.0,
                                     epsabs=0.0, epsrel=1e-13, limit=200)
            if not mass > 0:
                raise DomainError("kernel must have positive mass")
            object.__setattr__(self, "norm", 1.0 / mass)

    def __call__(self, u):
        return self.norm * self.psi(u)

    def mass(self) -> float:
        val, _ = integrate.quad(lambda u: float(self(np.array([u]))[0]), -1.0, 1.0,
                                epsabs=0.0, epsrel=1e-13, limit=200)
        return val

    def derivative(self, u):
        """psi'(u) for the default bump; central differences otherwise."""
        u = np.asarray(u, dtype=float)
        if self.psi is _bump:
            out = np.zeros_like(u)
            inside = np.abs(u) < 1.0
            v = u[inside]
            out[inside] = -2.0 * v / (1.0 - v * v) ** 2 * np.exp(-1.0 / (1.0 - v * v))
            return self.norm * out
        h = 1e-6
        return (self(u + h) - self(u - h)) / (2 * h)


def bump_kernel() -> MollifierKernel:
    return MollifierKernel()


@dataclass(frozen=True)
class TimeCoefficient:
    """A coefficient a(t) on [0, T] with a declared modulus of continuity.

    ``kinks`` lists the points where a is not smooth; quadratures split
    there so that the rule stays accurate. ``func`` must accept numpy arrays.
    """

    func: Callable
    T: float = 1.0
    modulus: Modulus = Modulus("lipschitz")
    extension: str = "reflect"
    kinks: tuple = ()
    name: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.extension not in EXTENSIONS:
            raise DomainError(f"unknown extension {self.extension!r}")

    def __call__(self, t):
        return self.func(t)

    def extended(self, t):
        """a outside [0, T] by even reflection about both ends, or by the endpoint values."""
        t = np.asarray(t, dtype=float)
        T = self.T
        if self.extension == "constant":
            return self.func(np.clip(t, 0.0, T))
        tau = np.mod(t, 2 * T)
        tau = np.where(tau > T, 2 * T - tau, tau)
        return self.func(tau)

    def extended_kinks(self, lo: float, hi: float) -> list[float]:
        """Non-smooth points of the extended coefficient inside (lo, hi)."""
        T = self.T
        base = list(self.kinks) + [0.0, T]
        out = set()
        k0 = math.floor(lo / (2 * T)) - 1
        k1 = math.ceil(hi / (2 * T)) + 1
        for k in range(k0, k1 + 1):
            for p in base:
                for q in (2 * k * T + p, 2 * k * T - p):
                    if lo < q < hi:
                        out.add(q)
        return sorted(out)

    def modulus_constant(self, pairs: int = 500, seed: int = 0) -> float:
        """Largest sampled |a(t) - a(r)| / mu(|t - r|)."""
        rng = np.random.default_rng(seed)
        t = rng.uniform(0, self.T, pairs)
        r = np.clip(t + rng.normal(0, 0.05 * self.T, pairs), 0, self.T)
        num = np.abs(np.asarray(self.func(t)) - np.asarray(self.func(r)))
        den = np.array([self.modulus.mu(abs(a - b)) for a, b in zip(t, r)])
        mask = den > 0
        return float(np.max(num[mask] / den[mask])) if mask.any() else 0.0

    def to_dict(self):
        if not self.params:
            raise SpecError("coefficient was not built from a catalog entry")
        return dict(self.params)


# catalog coefficients
class _Const:
    def __init__(self, value):
        self.value = value

    def __call__(self, t):
        return np.full(np.shape(t), self.value) if np.ndim(t) else self.value


class _Power:
    def __init__(self, c, p, shift):
        self.c, self.p, self.shift = c, p, shift

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self.c * abs(float(t) - self.shift) ** self.p
        return self.c * np.abs(np.asarray(t, dtype=float) - self.shift) ** self.p


class _Poly:
    def __init__(self, coeffs):
        self.coeffs = tuple(coeffs)

    def __call__(self, t):
        acc = 0.0 * np.asarray(t, dtype=float) if np.ndim(t) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc


def _hoelder_modulus_for(p: float) -> Modulus:
    if p >= 1:
        return Modulus("lipschitz")
    return Modulus("hoelder", alpha=p)


def const(value, T: float = 1.0) -> TimeCoefficient:
    return TimeCoefficient(_Const(value), T, Modulus("lipschitz"), name="const",
                           params={"kind": "const", "value": value})


def power(c, p: float, shift: float = 0.0, T: float = 1.0, modulus: Optional[Modulus] = None) -> TimeCoefficient:
    """c |t - shift|^p."""
    if p < 0:
        raise DomainError("power coefficient needs p >= 0")
    smooth = float(p).is_integer() and int(p) % 2 == 0
    kinks = (shift,) if 0 < shift < T and not smooth else ()
    return TimeCoefficient(_Power(c, p, shift), T, modulus or _hoelder_modulus_for(p), kinks=kinks,
                           name="power", params={"kind": "power", "c": c, "p": p, "shift": shift})


def poly(coeffs: Sequence, T: float = 1.0) -> TimeCoefficient:
    """sum_k coeffs[k] t^k."""
    return TimeCoefficient(_Poly(coeffs), T, Modulus("lipschitz"), name="poly",
                           params={"kind": "poly", "coeffs": list(coeffs)})


# mollification
def _rule(lo: float, hi: float, left_kink: bool, right_kink: bool, n: int):
    """Nodes and weights on [lo, hi], graded towards kinked ends.

    Near a kink at an end e the map u = e + (other - e) y^4 turns |u - e|^alpha
    into a smooth function of y for the common exponents.
    """
    x, w = gauss_legendre(n)
    if not left_kink and not right_kink:
        return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w
    if left_kink and right_kink:
        mid = 0.5 * (lo + hi)
        a = _rule(lo, mid, True, False, n)
        b = _rule(mid, hi, False, True, n)
        return np.concatenate([a[0], b[0]]), np.concatenate([a[1], b[1]])
    # graded half next to the kink, plain rule on the half next to the kernel edge
    mid = 0.5 * (lo + hi)
    y = 0.5 * (x + 1.0)
    wy = 0.5 * w
    L = mid - lo
    if left_kink:
        gu, gw = lo + L * y ** 4, 4.0 * L * y ** 3 * wy
        pu, pw = _rule(mid, hi, False, False, n)
    else:
        gu, gw = hi - L * y ** 4, 4.0 * L * y ** 3 * wy
        pu, pw = _rule(lo, mid, False, False, n)
    return np.concatenate([gu, pu]), np.concatenate([gw, pw])


def mollified_value(a: TimeCoefficient, kernel: MollifierKernel, eps: float, t: float, order: int = 64,
                    weight=None):
    """int a(t - eps u) psi(u) du over [-1, 1] (psi replaced by ``weight`` if given, without normalization)."""
    kinks_t = a.extended_kinks(t - eps, t + eps)
    cuts = sorted({(t - k) / eps for k in kinks_t})
    cuts = [c for c in cuts if -1.0 < c < 1.0]
    edges = [-1.0] + cuts + [1.0]
    kinked = set(cuts)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        u, wu = _rule(lo, hi, lo in kinked, hi in kinked, order)
        nodes.append(u)
        weights.append(wu)
    u = np.concatenate(nodes)
    wu = np.concatenate(weights)
    vals = np.asarray(a.extended(t - eps * u))
    if weight is not None:
        return np.sum(wu * weight(u) * vals)
    # divide by the discrete mass so constants (and, by symmetry, lines) are reproduced exactly
    k = wu * kernel(u)
    return np.sum(k * vals) / np.sum(k)


class _Mollified:
    def __init__(self, a, kernel, eps, order):
        self.a, self.kernel, self.eps, self.order = a, kernel, eps, order

    def __call__(self, t):
        if np.ndim(t) == 0:
            return mollified_value(self.a, self.kernel, self.eps, float(t), self.order)
        return np.array([mollified_value(self.a, self.kernel, self.eps, float(v), self.order)
                         for v in np.ravel(t)]).reshape(np.shape(t))


def mollify(a: TimeCoefficient, kernel: Optional[MollifierKernel] = None, eps: float = 0.01,
            order: int = 64) -> TimeCoefficient:
    """Convolution of a with psi_eps(x) = psi(x/eps)/eps by fixed-order quadrature."""
    kernel = kernel or bump_kernel()
    if not 0 < eps <= a.T / 2:
        raise DomainError("eps must lie in (0, T/2]")
    return TimeCoefficient(_Mollified(a, kernel, eps, order), a.T, a.modulus, a.extension, (),
                           name=f"mollified({a.name})")


def mollify_at_frequency(a: TimeCoefficient, kernel: Optional[MollifierKernel], xi_mag: float,
                         order: int = 64) -> TimeCoefficient:
    """Mollification with the frequency-tied scale eps = 1/<xi>."""
    return mollify(a, kernel, min(1.0 / xi_mag, a.T / 2), order)


def mollified_derivative(a: TimeCoefficient, kernel: MollifierKernel, eps: float, t: float,
                         order: int = 64) -> float:
    """d/dt of the mollified coefficient by a central difference of the quadrature (step eps*1e-3)."""
    h = eps * 1e-3
    return (mollified_value(a, kernel, eps, t + h, order) - mollified_value(a, kernel, eps, t - h, order)) / (2 * h)


@dataclass
class MollifyReport:
    eps: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    slope_tol: float = 0.1

    @staticmethod
    def _trend(eps, R) -> float:
        R = np.asarray(R, dtype=float)
        if np.all(R == 0):
            return 0.0
        if np.any(R <= 0):
            return math.inf
        return loglog_slope(eps, R)

    @property
    def slope1(self) -> float:
        return self._trend(self.eps, self.R1)

    @property
    def slope2(self) -> float:
        return self._trend(self.eps, self.R2)

    @property
    def passed(self) -> bool:
        return abs(self.slope1) <= self.slope_tol and abs(self.slope2) <= self.slope_tol

    def rows(self):
        return [(e, r1, r2) for e, r1, r2 in zip(self.eps, self.R1, self.R2)]

    def to_dict(self):
        return {"pass": self.passed, "slope_R1": self.slope1, "slope_R2": self.slope2,
                "R1_max": float(np.max(self.R1)), "R2_max": float(np.max(self.R2))}


MOLLIFY_COLUMNS = ("eps", "R1", "R2")


def verify_mollifier_bounds(a: TimeCoefficient, kernel: Optional[MollifierKernel], eps_list, t_grid,
                            order: int = 64, near_kink_points: int = 33) -> MollifyReport:
    """R1(eps) = max |d_t a_eps| eps/mu(eps) and R2(eps) = max |a - a_eps|/mu(eps).

    The maxima run over ``t_grid`` plus, for each eps, ``near_kink_points``
    points within 2 eps of every declared kink: that is where both suprema
    live, and a fixed grid would miss them once eps is below its spacing.
    """
    kernel = kernel or bump_kernel()
    eps_arr = np.asarray(eps_list, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    R1 = np.empty_like(eps_arr)
    R2 = np.empty_like(eps_arr)
    for i, eps in enumerate(eps_arr):
        extra = [k + eps * c for k in a.kinks for c in np.linspace(-2, 2, near_kink_points)]
        ts = np.concatenate([t_grid, np.array(extra, dtype=float)])
        ts = ts[(ts > t_grid.min() - 1e-15) & (ts < t_grid.max() + 1e-15)]
        mu_eps = a.modulus.mu(eps)
        d = max(abs(mollified_derivative(a, kernel, eps, t, order)) for t in ts)
        diff = max(abs(float(a(t)) - mollified_value(a, kernel, eps, t, order)) for t in ts)
        R1[i] = d * eps / mu_eps
        R2[i] = diff / mu_eps
    return MollifyReport(eps_arr, R1, R2)
