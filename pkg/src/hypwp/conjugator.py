"""The scalar conjugation weight Phi(t0, xi) and its reduction estimates.

Phi is a sum of eight addends: seven integrals over [0, t0] of zone-cut
integrands plus the energy term -M8 (T - kappa t0) <xi>^(1/s). The cutoff
argument <xi>/(N w^m) depends on t only through ell = log Lambda(t), so the
hyperbolic-zone integrals whose integrand carries a factor lambda are taken
in ell, where dt lambda = Lambda d ell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from ._numerics import cutoff, linear_slope, parallel_map
from .analysis import ProblemSpec
from .errors import DomainError, NumericalError
from .leviweight import ZonePartition, drho_over_rho, levi_part, log_levi_product, log_rho, t_xi


@dataclass(frozen=True)
class ConjugatorConfig:
    ps: ProblemSpec
    M_tilde: tuple = (1.0,) * 7
    M8: float = 1.0
    kappa: float = 1.0
    t1: Optional[float] = None

    def __post_init__(self):
        if len(self.M_tilde) != 7 or any(not (math.isfinite(v) and v >= 0) for v in self.M_tilde):
            raise DomainError("M_tilde must hold seven finite nonnegative constants")
        if not (math.isfinite(self.M8) and self.M8 >= 0):
            raise DomainError("M8 must be finite and nonnegative")
        if not (0 < self.kappa <= 1):
            raise DomainError("kappa must lie in (0, 1] so that kappa t0 stays in [0, T]")

    @property
    def lw(self):
        return self.ps.lw

    @property
    def zones(self) -> ZonePartition:
        return self.ps.zones

    @property
    def T(self) -> float:
        return self.lw.shape.T

    @property
    def gevrey_exponent(self) -> float:
        s = self.lw.s
        return 0.0 if s is None or math.isinf(s) else 1.0 / s

    @property
    def t1_value(self) -> float:
        """Default: Lambda(t1) = 1/e (clamped to T)."""
        if self.t1 is not None:
            return min(self.t1, self.T)
        sh = self.lw.shape
        if sh.log_Lam(self.T) <= -1.0:
            return self.T
        lo, hi = 0.0, self.T
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if sh.log_Lam(mid) > -1.0:
                hi = mid
            else:
                lo = mid
        return lo

    def to_dict(self):
        return {"M_tilde": list(self.M_tilde), "M8": self.M8, "kappa": self.kappa, "t1": self.t1_value}


def _quad(f, a, b, points=None):
    if b <= a:
        return 0.0
    pts = [p for p in (points or []) if a < p < b] or None
    val, err = integrate.quad(f, a, b, points=pts, epsabs=1e-13, epsrel=1e-10, limit=400)
    if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
        raise NumericalError(f"addend quadrature did not converge on [{a:g}, {b:g}]", achieved=err)
    return val


class _Zones:
    """Cutoff data for one frequency."""

    def __init__(self, cfg: ConjugatorConfig, x: float):
        lw, z = cfg.lw, cfg.zones
        self.x = x
        self.log_x = math.log(x) - math.log(z.N)
        self.tA = t_xi(lw, z, x).t
        self.tB = t_xi(lw, ZonePartition(2 * z.N, z.M_cut), x).t
        self.lw = lw

    def chi_ell(self, ell: float) -> float:
        return cutoff(math.exp(self.log_x - self.lw.log_wm_ell(ell)))

    def chi_t(self, t: float) -> float:
        if t <= self.tA:
            return 1.0
        if t >= self.tB:
            return 0.0
        return self.chi_ell(self.lw.shape.log_Lam(t))


def _lower_time(lw, x, t_hi):
    """A time below which <xi> lambda^m w^(m(m-1)) < e^-40 (rho stays 1 to double precision)."""
    t = t_hi
    while t > lw.shape.T * 1e-300:
        if math.log(x) + log_levi_product(lw, t) < -40.0:
            return t
        t /= 10.0
    return t


def phi_addends(cfg: ConjugatorConfig, t0: float, xi_mag: float) -> list[float]:
    """The eight addends of Phi(t0, xi), in order."""
    zones = cfg.zones
    if not xi_mag > zones.M_cut:
        raise DomainError("<xi> must exceed M_cut")
    T = cfg.T
    if not 0 <= t0 <= T:
        raise DomainError(f"t0={t0!r} outside [0, {T}]")
    lw = cfg.lw
    sh = lw.shape
    M = cfg.M_tilde
    phi = cfg.ps.mu.phi(xi_mag)
    energy = -cfg.M8 * (T - cfg.kappa * t0) * xi_mag ** cfg.gevrey_exponent
    if t0 == 0.0:
        return [0.0] * 7 + [energy]
    Z = _Zones(cfg, xi_mag)
    tA, tB = Z.tA, Z.tB
    a = min(t0, tA)
    b = min(t0, tB)
    t_lo = _lower_time(lw, xi_mag, a)

    # 1: rho chi; rho = 1 below t_lo
    i1 = min(t_lo, a) + _quad(lambda t: math.exp(log_rho(lw, t, xi_mag)), t_lo, a)
    i1 += _quad(lambda t: math.exp(log_rho(lw, t, xi_mag)) * Z.chi_t(t), a, b)
    # 2: (d_t rho / rho) chi, in log time on the pseudodifferential part
    i2 = _quad(lambda u: drho_over_rho(lw, math.exp(u), xi_mag) * math.exp(u), math.log(t_lo), math.log(a)) \
        if a > t_lo else 0.0
    i2 += _quad(lambda t: drho_over_rho(lw, t, xi_mag) * Z.chi_t(t), a, b)
    # hyperbolic-zone integrals in ell = log Lambda over [tA, t0]
    if t0 > tA:
        eA, eB, e0 = sh.log_Lam(tA), sh.log_Lam(min(tB, t0)), sh.log_Lam(t0)

        def tilde(e):
            return 1.0 - Z.chi_ell(e)

        i3 = _quad(lambda e: math.exp(lw.log_wm_ell(e) + e) * tilde(e), eA, e0, [eB])
        i_lam = _quad(lambda e: math.exp(e) * tilde(e), eA, eB) + (math.exp(e0) - math.exp(eB))
        i5 = _quad(tilde, eA, eB) + (e0 - eB)
        i7 = _quad(lambda t: 1.0 - Z.chi_t(t), tA, min(tB, t0)) + max(0.0, t0 - tB)
    else:
        i3 = i_lam = i5 = i7 = 0.0
    return [M[0] * i1, M[1] * i2, M[2] * i3, M[3] * phi * i_lam, M[4] * i5, M[5] * i_lam,
            M[6] * phi * i7, energy]


def phi_value(cfg: ConjugatorConfig, t0: float, xi_mag: float) -> float:
    return float(sum(phi_addends(cfg, t0, xi_mag)))


def majorant3(cfg: ConjugatorConfig, t_end: float, xi_mag: float) -> float:
    """int_0^t_end lambda w^m (1 - chi) dt, the addend-3 type majorant."""
    return phi_addends(ConjugatorConfig(cfg.ps, (0, 0, 1, 0, 0, 0, 0), 0.0, cfg.kappa), t_end, xi_mag)[2]


def reduced_exponent(cfg: ConjugatorConfig, t0: float, xi_mag: float, addends=None, M=None) -> float:
    """Reduced form built from addends 1 and 3, log<xi> chi(t0), phi (1 - chi(t0)) and the energy term."""
    ad = addends if addends is not None else phi_addends(cfg, t0, xi_mag)
    M1, M2, M3, M4 = M or (cfg.M_tilde[0], cfg.M_tilde[1], cfg.M_tilde[2], cfg.M_tilde[3])
    Mt = cfg.M_tilde
    chi0 = _Zones(cfg, xi_mag).chi_t(t0) if t0 > 0 else 1.0
    first = ad[0] / Mt[0] if Mt[0] else 0.0
    third = ad[2] / Mt[2] if Mt[2] else 0.0
    return (M1 * first + M2 * math.log(xi_mag) * chi0 + M3 * third
            + M4 * cfg.ps.mu.phi(xi_mag) * (1.0 - chi0) + cfg.M8 * (cfg.T - cfg.kappa * t0) * xi_mag ** cfg.gevrey_exponent)


class _Row:
    def __init__(self, cfg, t0_grid):
        self.cfg, self.t0_grid = cfg, t0_grid

    def __call__(self, x):
        cfg = self.cfg
        t1 = cfg.t1_value
        out = []
        for t0 in self.t0_grid:
            ad = phi_addends(cfg, t0, x)
            maj = majorant3(cfg, min(t0, t1), x)
            out.append((ad, maj, reduced_exponent(cfg, t0, x, ad)))
        full = phi_addends(cfg, cfg.T, x)
        return out, full[0] / cfg.M_tilde[0] if cfg.M_tilde[0] else 0.0


@dataclass
class PhiReport:
    xi: np.ndarray
    t0: np.ndarray
    t1: float
    addends: np.ndarray            # shape (len(xi), len(t0), 8)
    majorant: np.ndarray           # shape (len(xi), len(t0))
    reduced: np.ndarray
    first_at_T: np.ndarray
    levi: np.ndarray
    slope_tol: float = 0.05
    notes: dict = field(default_factory=dict)

    def _trend(self, series) -> float:
        s = np.asarray(series, dtype=float)
        scale = np.mean(np.abs(s))
        return 0.0 if scale == 0 else linear_slope(self.xi, s / scale)

    @property
    def c2_series(self):
        return self.addends[:, :, 1].max(axis=1) / np.log(self.xi)

    @property
    def c6_series(self):
        return self.addends[:, :, 5].max(axis=1)

    @property
    def c5_series(self):
        return (self.addends[:, :, 4] / (self.majorant + 1.0)).max(axis=1)

    @property
    def first_ratio(self):
        return self.first_at_T / (self.levi + 1.0)

    @property
    def kappa_threshold(self) -> float:
        """Smallest M8 kappa that keeps Phi non-decreasing in t0 on the grid."""
        part = self.addends[:, :, :7].sum(axis=2)
        worst = 0.0
        exps = self.notes.get("energy_scale")
        for i in range(self.xi.size):
            d = np.diff(part[i]) / np.diff(self.t0)
            worst = max(worst, float(np.max(-d / exps[i])) if d.size else 0.0)
        return max(0.0, worst)

    @property
    def reduced_constant(self) -> float:
        """max over the grid of Phi - reduced exponent."""
        return float((self.addends.sum(axis=2) - self.reduced).max())

    @property
    def constants(self) -> dict:
        return {"C2": float(self.c2_series.max()), "C6": float(self.c6_series.max()),
                "C5": float(self.c5_series.max()), "C1": float(self.first_ratio.max())}

    @property
    def trends(self) -> dict:
        return {"C2": self._trend(self.c2_series), "C6": self._trend(self.c6_series),
                "C5": self._trend(self.c5_series), "C1": self._trend(self.first_ratio)}

    @property
    def passed(self) -> bool:
        c = self.constants
        return all(math.isfinite(v) for v in c.values()) and all(v <= self.slope_tol for v in self.trends.values())

    def to_dict(self):
        return {
            "pass": self.passed, "constants": self.constants, "trends": self.trends,
            "slope_tol": self.slope_tol, "kappa_threshold": self.kappa_threshold,
            "reduced_form_constant": self.reduced_constant, "t1": self.t1,
            "xi": self.xi.tolist(), "t0": self.t0.tolist(),
            "C2_series": self.c2_series.tolist(), "C6_series": self.c6_series.tolist(),
            "C5_series": self.c5_series.tolist(), "C1_series": self.first_ratio.tolist(),
        }


def default_t0_grid(T: float) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(T * 1e-2, T, 12)])


def verify_phi_reduction(cfg: ConjugatorConfig, xi_grid=None, t0_grid=None, workers: int = 1,
                         slope_tol: float = 0.05) -> PhiReport:
    """Three reduction constants over a (xi, t0) grid plus the addend-1 majorant ratio."""
    xi = np.geomspace(1e3, 1e8, 11) if xi_grid is None else np.asarray(xi_grid, dtype=float)
    t0 = default_t0_grid(cfg.T) if t0_grid is None else np.sort(np.asarray(t0_grid, dtype=float))
    rows = parallel_map(_Row(cfg, t0.tolist()), xi.tolist(), workers)
    addends = np.array([[r[0] for r in row] for row, _ in rows])
    majorant = np.array([[r[1] for r in row] for row, _ in rows])
    reduced = np.array([[r[2] for r in row] for row, _ in rows])
    first = np.array([f for _, f in rows])
    levi = np.array([levi_part(cfg.lw, cfg.zones, x) for x in xi])
    return PhiReport(xi, t0, cfg.t1_value, addends, majorant, reduced, first, levi, slope_tol,
                     notes={"energy_scale": [x ** cfg.gevrey_exponent for x in xi]})
