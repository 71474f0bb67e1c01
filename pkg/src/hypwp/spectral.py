"""Per-frequency first-order systems for x-independent model problems.

For D_t^m u = sum_j lambda^(m-j) a_j(t) xi^(m-j) D_t^j u + sum b_(j,g)(t) xi^g D_t^j u
the Fourier mode v(t) is turned into the energy vector

    U_k = h(t, xi)^(m-1-k) D_t^k v,     k = 0, ..., m-1,

which solves D_t U = (A + B) U. The symbol h equals rho in the
pseudodifferential zone and <xi> lambda(t) in the hyperbolic zone, blended
by the fixed polynomial cutoff. Modes are integrated with DOP853; the
pseudodifferential segment is integrated in log time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from ._numerics import bracket, cutoff, cutoff_derivative, linear_slope, log, loglog_slope, parallel_map
from .analysis import loss_weight
from .errors import DomainError, NumericalError
from .leviweight import LeviWeight, ZonePartition, _log1p_exp, t_xi, xi_from_bracket
from .mollify import MollifierKernel, TimeCoefficient, bump_kernel, const, mollified_value, power
from .moduli import Modulus
from .shape import ShapeFunction


# Levi-type lower-order coefficient
class _LeviCoef:
    """scale * min(lambda^(m-j) w^(m(m-j-g)), cap)."""

    def __init__(self, lw, j, gamma, scale, cap):
        self.lw, self.j, self.gamma, self.scale, self.cap = lw, j, gamma, scale, cap

    def log_bound(self, t):
        lw = self.lw
        m = lw.m
        t = max(float(t), lw.shape.T * 1e-300)
        return (m - self.j) * lw.shape.log_lam(t) + (m - self.j - self.gamma) * lw.log_wm(t)

    def _one(self, t):
        lb = self.log_bound(t)
        return self.scale * (self.cap if lb >= math.log(self.cap) else math.exp(lb))

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self._one(t)
        return np.array([self._one(v) for v in np.ravel(t)]).reshape(np.shape(t))


def levi_coefficient(lw: LeviWeight, j: int, gamma: int, scale=1.0, cap: float = 1e3) -> TimeCoefficient:
    """Lower-order coefficient saturating the Levi condition, capped near t = 0."""
    sc = [scale.real, scale.imag] if isinstance(scale, complex) else scale
    return TimeCoefficient(_LeviCoef(lw, j, gamma, scale, cap), lw.shape.T, Modulus("lipschitz"), name="levi",
                           params={"kind": "levi", "scale": sc, "cap": cap})


@dataclass
class ModelProblem:
    """Model equation with time-dependent coefficients only.

    ``principal[j]`` is the coefficient of lambda^(m-j) xi^(m-j) D_t^j and
    ``lower[(j, g)]`` the coefficient of xi^g D_t^j (j + g < m). With
    ``strictly_hyperbolic`` the shape is replaced by lambda = 1 and h = <xi>.
    """

    m: int
    principal: list
    lower: dict
    lw: LeviWeight
    zones: ZonePartition = ZonePartition()
    mu: Modulus = Modulus("lipschitz")
    kernel: Optional[MollifierKernel] = None
    strictly_hyperbolic: bool = False
    name: str = ""
    levi_constants: dict = field(init=False, default_factory=dict)

    def __post_init__(self):
        if self.m not in (2, 3):
            raise DomainError("model problems of order 2 or 3 are supported")
        if self.lw.m != self.m:
            raise DomainError("Levi weight and model problem disagree on the order")
        if len(self.principal) != self.m:
            raise DomainError(f"need {self.m} principal coefficients, one per power of D_t")
        for (j, g) in self.lower:
            if j < 0 or g < 0 or j + g >= self.m:
                raise DomainError(f"lower-order term (j={j}, gamma={g}) needs j + gamma < m")
        if self.kernel is None:
            self.kernel = bump_kernel()
        self._check_hyperbolic()
        self.levi_constants = self._levi_audit()

    @property
    def T(self) -> float:
        return self.lw.shape.T

    def _check_hyperbolic(self, samples: int = 65):
        for t in np.linspace(0.0, self.T, samples):
            a = [complex(c(float(t))) for c in self.principal]
            roots = np.roots([1.0] + [-a[j] for j in range(self.m - 1, -1, -1)])
            scale = max(1.0, float(np.max(np.abs(roots))))
            if np.max(np.abs(roots.imag)) > 1e-8 * scale:
                raise DomainError(f"principal part is not hyperbolic at t={t:g}: complex roots {roots}")
            r = np.sort(roots.real)
            if np.min(np.diff(r)) <= 1e-8 * scale:
                raise DomainError(f"principal part is not strictly hyperbolic at t={t:g}: roots {r}")

    def _levi_audit(self, points: int = 64) -> dict:
        """Sampled sup of |b_(j,g)| / (lambda^(m-j) w^(m(m-j-g))), per lower-order term."""
        out = {}
        grid = np.geomspace(self.T * 1e-3, self.T, points)
        m = self.m
        for (j, g), b in sorted(self.lower.items()):
            best = 0.0
            for t in grid:
                v = abs(complex(b(float(t))))
                if v == 0.0:
                    continue
                lb = (m - j) * self.lw.shape.log_lam(t) + (m - j - g) * self.lw.log_wm(t)
                best = max(best, math.exp(math.log(v) - lb))
            out[f"j={j},gamma={g}"] = best
        return out

    def to_dict(self):
        return {
            "m": self.m,
            "principal": [c.to_dict() for c in self.principal],
            "lower": [{"j": j, "gamma": g, "coef": c.to_dict()} for (j, g), c in sorted(self.lower.items())],
            "strictly_hyperbolic": self.strictly_hyperbolic,
        }


# catalog model problems
def sharp_gevrey_model(l: int = 4, k: int = 1, T: float = 1.0) -> ModelProblem:
    """u_tt - t^(2l) u_xx - t^k u_x = 0, paired with the Gevrey index (2l-k)/(l-1-k)."""
    if not k < l - 1:
        raise DomainError("the model needs k < l - 1")
    s = (2 * l - k) / (l - 1 - k)
    lw = LeviWeight(2, s, ShapeFunction.monomial(l, T))
    lower = {(0, 1): power(-1j, k, 0.0, T)}
    return ModelProblem(2, [const(1.0, T), const(0.0, T)], lower, lw, name=f"sharp_gevrey(l={l},k={k})")


def wave_model(l: float = 4, s: float = 3.0, T: float = 1.0, strictly_hyperbolic: bool = False) -> ModelProblem:
    """u_tt - lambda^2 u_xx = 0 with lambda = t^l."""
    lw = LeviWeight(2, s, ShapeFunction.monomial(l, T))
    return ModelProblem(2, [const(1.0, T), const(0.0, T)], {}, lw,
                        strictly_hyperbolic=strictly_hyperbolic, name="wave")


def levi_saturating_model(s: float = 3.0, l: float = 4, j: int = 1, gamma: int = 0, scale=1.0,
                          cap: float = 1e3, T: float = 1.0) -> ModelProblem:
    """Second-order model whose single lower-order term saturates the Levi condition."""
    lw = LeviWeight(2, s, ShapeFunction.monomial(l, T))
    lower = {(j, gamma): levi_coefficient(lw, j, gamma, scale, cap)}
    return ModelProblem(2, [const(1.0, T), const(0.0, T)], lower, lw, name="levi_saturating")


# symbols
@dataclass
class _Local:
    lam: float
    h: float
    dh_over_h: float
    chi: float


def _local(mp: ModelProblem, t: float, jx: float) -> _Local:
    """lambda, h, (d_t h)/h and the cutoff value at (t, <xi>)."""
    if mp.strictly_hyperbolic:
        return _Local(1.0, jx, 0.0, 0.0)
    lw = mp.lw
    sh = lw.shape
    m = mp.m
    if t <= 0.0:
        return _Local(0.0, 1.0, 0.0, 1.0)
    log_lam = sh.log_lam(t)
    lam = math.exp(log_lam)
    ell = sh.log_Lam(t)
    log_wm = lw.log_wm_ell(ell)
    log_z = math.log(jx) - math.log(mp.zones.N) - log_wm
    dlam = sh.log_derivative(t)
    if log_z >= math.log(2.0):
        return _Local(lam, jx * lam, dlam, 0.0)
    # d/dt log w^m
    dlog_wm = lw.dlog_wm_dell(ell) * math.exp(log_lam - ell)
    logP = math.log(jx) + m * log_lam + (m - 1) * log_wm
    rho_ = math.exp(_log1p_exp(logP) / m)
    frac = 1.0 / (1.0 + math.exp(-logP)) if logP > -700.0 else math.exp(logP)
    drho = frac * (m * dlam + (m - 1) * dlog_wm) / m
    if log_z <= 0.0:
        return _Local(lam, rho_, drho, 1.0)
    z = math.exp(log_z)
    chi = cutoff(z)
    dchi = cutoff_derivative(z) * (-z * dlog_wm)
    hyp = jx * lam
    h = rho_ * chi + hyp * (1.0 - chi)
    dh = rho_ * drho * chi + rho_ * dchi + hyp * dlam * (1.0 - chi) - hyp * dchi
    return _Local(lam, h, dh / h, chi)


def h_symbol(mp: ModelProblem, t: float, xi_mag: float) -> float:
    """Blend of rho (small t) and <xi> lambda (large t); always >= 1 for t small."""
    return _local(mp, float(t), float(xi_mag)).h


def boundary_ratio(mp: ModelProblem, xi_mag: float) -> float:
    """rho(t_xi, xi) / (<xi> lambda(t_xi)) at the zone boundary."""
    from .leviweight import log_rho

    tx = t_xi(mp.lw, mp.zones, xi_mag).t
    return math.exp(log_rho(mp.lw, tx, xi_mag) - math.log(xi_mag) - mp.lw.shape.log_lam(tx))


def _principal_values(mp: ModelProblem, t: float, regularized: bool, eps: Optional[float]):
    if not regularized:
        return [complex(c(t)) for c in mp.principal]
    if eps is None:
        raise DomainError("regularized coefficients need eps")
    eps = min(eps, mp.T / 2)
    return [complex(mollified_value(c, mp.kernel, eps, t)) for c in mp.principal]


def char_roots(mp: ModelProblem, t: float, xi: float, regularized: bool = False, eps: Optional[float] = None):
    """Roots of tau^m = sum_j lambda^(m-j) a_j xi^(m-j) tau^j, ascending."""
    m = mp.m
    if regularized and eps is None:
        eps = 1.0 / bracket(xi)
    a = _principal_values(mp, float(t), regularized, eps)
    lam = 1.0 if mp.strictly_hyperbolic else mp.lw.shape.lam(t)
    p = [lam ** (m - j) * a[j] * xi ** (m - j) for j in range(m)]
    roots = np.linalg.eigvals(_companion(p))
    scale = max(1e-300, float(np.max(np.abs(roots))))
    if np.max(np.abs(roots.imag)) > 1e-8 * scale:
        raise DomainError(f"complex characteristic roots at t={t!r}, xi={xi!r}: {roots}")
    return sorted(float(r) for r in roots.real)


def _companion(p):
    """Companion matrix of tau^m - sum_j p_j tau^j."""
    m = len(p)
    C = np.zeros((m, m), dtype=complex)
    C[:-1, 1:] = np.eye(m - 1)
    C[-1, :] = p
    return C


def _coefficients(mp: ModelProblem, t: float, xi: float, lam: float, principal=None):
    """Coefficient c_k of D_t^k v in D_t^m v (principal and lower parts separately)."""
    m = mp.m
    a = principal if principal is not None else [complex(c(t)) for c in mp.principal]
    top = [lam ** (m - k) * a[k] * xi ** (m - k) for k in range(m)]
    low = [0j] * m
    for (j, g), b in mp.lower.items():
        low[j] += complex(b(t)) * xi ** g
    return top, low


def first_order_system(mp: ModelProblem, t: float, xi: float, eps: Optional[float] = None):
    """(A, B) with D_t U = (A + B) U; eps defaults to 1/<xi>.

    A carries h on the superdiagonal and the principal coefficients (the
    original ones weighted by chi, the regularized ones by 1 - chi) in the
    last row. B carries (m-1-k) D_t h / h on the diagonal, the lower-order
    terms and the regularization difference in the last row.
    """
    m = mp.m
    t = float(t)
    jx = bracket(xi)
    eps = 1.0 / jx if eps is None else eps
    loc = _local(mp, t, jx)
    h = loc.h
    A = np.zeros((m, m), dtype=complex)
    B = np.zeros((m, m), dtype=complex)
    for k in range(m - 1):
        A[k, k + 1] = h
        B[k, k] = (m - 1 - k) * (-1j) * loc.dh_over_h
    top, low = _coefficients(mp, t, xi, loc.lam)
    if loc.chi < 1.0:
        top_eps, _ = _coefficients(mp, t, xi, loc.lam, _principal_values(mp, t, True, eps))
    else:
        top_eps = top
    for k in range(m):
        d = h ** (m - 1 - k)
        A[m - 1, k] = (loc.chi * top[k] + (1.0 - loc.chi) * top_eps[k]) / d
        B[m - 1, k] = low[k] / d + (1.0 - loc.chi) * (top[k] - top_eps[k]) / d
    return A, B


def generator(mp: ModelProblem, t: float, xi: float) -> np.ndarray:
    """A + B; the regularization terms cancel, so the original coefficients are used."""
    m = mp.m
    jx = bracket(xi)
    loc = _local(mp, float(t), jx)
    G = np.zeros((m, m), dtype=complex)
    for k in range(m - 1):
        G[k, k + 1] = loc.h
        G[k, k] = (m - 1 - k) * (-1j) * loc.dh_over_h
    top, low = _coefficients(mp, float(t), xi, loc.lam)
    for k in range(m):
        G[m - 1, k] = (top[k] + low[k]) / loc.h ** (m - 1 - k)
    return G


def diagonalizer_condition(mp: ModelProblem, t: float, xi: float, d=None) -> float:
    """Condition number of the Vandermonde matrix in psi_k / h, psi_k = d_k rho chi + tau_k (1 - chi)."""
    from .leviweight import rho as rho_fn

    m = mp.m
    d = list(range(1, m + 1)) if d is None else list(d)
    jx = bracket(xi)
    loc = _local(mp, float(t), jx)
    if loc.chi < 1.0:
        tau = char_roots(mp, t, xi, regularized=True, eps=1.0 / jx)
    else:
        tau = [0.0] * m
    r = 1.0 if (mp.strictly_hyperbolic or t == 0) else rho_fn(mp.lw, t, jx)
    psi = [d[k] * r * loc.chi + tau[k] * (1.0 - loc.chi) for k in range(m)]
    q = np.array(psi) / loc.h
    V = np.vander(q, m, increasing=True).T
    return float(np.linalg.cond(V))


# integration
class _Rhs:
    """d/dt U = i (A + B) U, written out for speed."""

    def __init__(self, mp: ModelProblem, xi: float, log_time: bool):
        self.mp, self.xi, self.jx, self.log_time = mp, xi, bracket(xi), log_time
        self.m = mp.m
        self.nfev = 0

    def __call__(self, s, U):
        self.nfev += 1
        t = math.exp(s) if self.log_time else s
        mp, m, xi = self.mp, self.m, self.xi
        loc = _local(mp, t, self.jx)
        h, g = loc.h, loc.dh_over_h
        top, low = _coefficients(mp, t, xi, loc.lam)
        out = np.empty(m, dtype=complex)
        for k in range(m - 1):
            out[k] = (m - 1 - k) * g * U[k] + 1j * h * U[k + 1]
        acc = 0j
        for k in range(m):
            acc += (top[k] + low[k]) * U[k] / h ** (m - 1 - k)
        out[m - 1] = 1j * acc
        if self.log_time:
            out *= t
        return out


def _start_time(mp: ModelProblem, xi: float, tol: float) -> float:
    """Largest t = T 10^-k with log h(t) + t |off-diagonal part of i(A+B)| <= 1e-3 tol."""
    m = mp.m
    t = mp.T
    jx = bracket(xi)
    while t > 1e-300:
        t /= 10.0
        loc = _local(mp, t, jx)
        G = generator(mp, t, xi)
        off = G.copy()
        for k in range(m - 1):
            off[k, k] = 0.0
        if math.log(loc.h) + t * np.linalg.norm(off, 2) <= 1e-3 * tol:
            return t
    raise NumericalError("could not find a start time near t=0 where the mode is still frozen")


@dataclass
class ModeTrajectory:
    xi: float
    xi_mag: float
    times: np.ndarray
    norms: np.ndarray
    amplification: float
    t_xi: float
    t_start: float
    breakpoints: list
    nfev: int
    steps: int
    diag_condition: float
    tol: float

    @property
    def log_amplification(self) -> float:
        return math.log(self.amplification)

    def to_dict(self):
        return {"xi": self.xi, "xi_mag": self.xi_mag, "amplification": self.amplification,
                "log_amplification": self.log_amplification, "t_xi": self.t_xi, "t_start": self.t_start,
                "breakpoints": list(self.breakpoints), "nfev": self.nfev, "steps": self.steps,
                "diag_condition": self.diag_condition, "tol": self.tol}


def _segment(mp, xi, U, a, b, tol, log_time):
    rhs = _Rhs(mp, xi, log_time)
    lo, hi = (math.log(a), math.log(b)) if log_time else (a, b)
    scale = max(float(np.linalg.norm(U)), 1e-300)
    sol = integrate.solve_ivp(rhs, (lo, hi), U, method="DOP853", rtol=tol, atol=1e-3 * tol * scale)
    if sol.status != 0:
        where = math.exp(sol.t[-1]) if log_time else sol.t[-1]
        hint = "" if log_time else "; enable the log-time parametrization"
        raise NumericalError(f"mode integration failed at t={where:.6g}, xi={xi:g}: {sol.message}{hint}")
    times = np.exp(sol.t) if log_time else sol.t
    return times, sol.y, rhs.nfev


def integrate_mode(mp: ModelProblem, xi: float, initial=None, tol: float = 1e-10, log_time: bool = True,
                   diag_samples: int = 8) -> ModeTrajectory:
    """Integrate one Fourier mode on [0, T] and record sup_t |U(t)| / |U(0)|.

    The mode is frozen on [0, t_start] (see _start_time). Forced breakpoints
    are the two cutoff plateaus t_xi(N) and t_xi(2N). The first segment runs
    in log time.
    """
    if not 0 < tol <= 1e-4:
        raise DomainError("tol must lie in (0, 1e-4]")
    m = mp.m
    xi = float(xi)
    jx = bracket(xi)
    U0 = np.ones(m, dtype=complex) / math.sqrt(m) if initial is None else np.asarray(initial, dtype=complex)
    if U0.shape != (m,):
        raise DomainError(f"initial data must have {m} entries")
    n0 = float(np.linalg.norm(U0))
    if n0 == 0:
        raise DomainError("initial data must be nonzero")
    T = mp.T
    if mp.strictly_hyperbolic:
        tx, cuts = T, []
        t0 = 0.0
    else:
        tx = t_xi(mp.lw, mp.zones, jx).t
        tx2 = t_xi(mp.lw, ZonePartition(2 * mp.zones.N, mp.zones.M_cut), jx).t
        t0 = _start_time(mp, xi, tol)
        cuts = sorted({c for c in (tx, tx2) if t0 < c < T})
    edges = [t0] + cuts + [T]
    times, norms = [0.0], [n0]
    U = U0
    nfev = 0
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        lt = log_time and i == 0 and a > 0
        ts, ys, nf = _segment(mp, xi, U, a, b, tol, lt)
        nfev += nf
        times.extend(ts.tolist())
        norms.extend(np.linalg.norm(ys, axis=0).tolist())
        U = ys[:, -1]
    times = np.array(times)
    norms = np.array(norms)
    probe = np.geomspace(max(t0, T * 1e-6), T, diag_samples) if diag_samples else []
    cond = max((diagonalizer_condition(mp, t, xi) for t in probe), default=math.nan)
    return ModeTrajectory(xi, jx, times, norms, float(norms.max() / n0), tx, t0, cuts, nfev,
                          len(times) - 1, cond, tol)


# loss measurement
LOSS_COLUMNS = ("xi", "t_xi", "log_amp", "M_weight")


class _ModeJob:
    def __init__(self, mp, tol):
        self.mp, self.tol = mp, tol

    def __call__(self, xi_mag):
        tr = integrate_mode(self.mp, xi_from_bracket(xi_mag), tol=self.tol, diag_samples=4)
        M = loss_weight(self.mp.lw, self.mp.zones, self.mp.mu, xi_mag)
        return (xi_mag, tr.t_xi, tr.log_amplification, M, tr.steps, tr.diag_condition)


def _power_log_fit(x, y):
    """Best theta in y ~ C x^theta + p log x + D (closed-form least squares in C, p, D)."""
    lx = np.log(x)

    def resid(theta):
        X = np.column_stack([x ** theta, lx, np.ones_like(x)])
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        return float(np.sum((X @ coef - y) ** 2))

    res = optimize.minimize_scalar(resid, bounds=(0.02, 1.0), method="bounded",
                                   options={"xatol": 1e-10})
    theta = float(res.x)
    X = np.column_stack([x ** theta, lx, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return theta, [float(c) for c in coef], math.sqrt(res.fun / len(x))


@dataclass
class LossReport:
    xi: np.ndarray
    t_xi: np.ndarray
    log_amp: np.ndarray
    M_weight: np.ndarray
    steps: np.ndarray
    diag_condition: np.ndarray
    tol: float
    convergence: dict = field(default_factory=dict)

    @property
    def ratio(self) -> np.ndarray:
        return self.log_amp / self.M_weight

    @property
    def ratio_trend(self) -> float:
        """Slope of (log amplification / M), normalized by its mean size, against log <xi>."""
        r = self.ratio
        return linear_slope(self.xi, r / np.mean(np.abs(r)))

    @property
    def origin_constant(self) -> float:
        """C in log amplification ~ C M (least squares through the origin)."""
        return float(np.dot(self.log_amp, self.M_weight) / np.dot(self.M_weight, self.M_weight))

    @property
    def origin_residual(self) -> float:
        return float(np.linalg.norm(self.log_amp - self.origin_constant * self.M_weight))

    @property
    def slope_vs_M(self) -> float:
        return float(np.polyfit(self.M_weight, self.log_amp, 1)[0])

    @property
    def theta_loglog(self) -> float:
        if np.any(self.log_amp <= 0):
            return math.nan
        return loglog_slope(self.xi, self.log_amp)

    @property
    def theta_fit(self):
        return _power_log_fit(self.xi, self.log_amp)

    def rows(self):
        return [(x, t, a, M) for x, t, a, M in zip(self.xi, self.t_xi, self.log_amp, self.M_weight)]

    def summary(self) -> dict:
        theta, coef, rms = self.theta_fit
        return {
            "points": int(self.xi.size), "xi_min": float(self.xi[0]), "xi_max": float(self.xi[-1]),
            "tol": self.tol,
            "origin_constant": self.origin_constant, "origin_residual": self.origin_residual,
            "ratio_max": float(self.ratio.max()), "ratio_trend": self.ratio_trend,
            "slope_vs_M": self.slope_vs_M,
            "theta": theta, "theta_model": {"C": coef[0], "p": coef[1], "D": coef[2], "rms": rms},
            "theta_loglog": self.theta_loglog,
            "steps_max": int(self.steps.max()), "diag_condition_max": float(self.diag_condition.max()),
            "convergence": self.convergence,
        }


def measure_loss(mp: ModelProblem, xi_grid, tol: float = 1e-10, workers: int = 1,
                 convergence_points: int = 3) -> LossReport:
    """Integrate every mode of a <xi> grid and compare log amplification with M(<xi>).

    ``convergence_points`` modes (spread over the grid) are re-run at tol/2
    and the largest relative change of log amplification is reported.
    """
    xi = np.sort(np.asarray(xi_grid, dtype=float))
    if np.any(xi <= mp.zones.M_cut):
        raise DomainError("frequencies must exceed M_cut")
    rows = parallel_map(_ModeJob(mp, tol), xi.tolist(), workers)
    rep = LossReport(
        xi=xi, t_xi=np.array([r[1] for r in rows]), log_amp=np.array([r[2] for r in rows]),
        M_weight=np.array([r[3] for r in rows]), steps=np.array([r[4] for r in rows]),
        diag_condition=np.array([r[5] for r in rows]), tol=tol,
    )
    if convergence_points:
        idx = sorted(set(np.linspace(0, xi.size - 1, convergence_points).round().astype(int).tolist()))
        again = parallel_map(_ModeJob(mp, tol / 2), [float(xi[i]) for i in idx], workers)
        changes = [abs(r[2] - rep.log_amp[i]) / max(abs(rep.log_amp[i]), 1e-300) for i, r in zip(idx, again)]
        rep.convergence = {"xi": [float(xi[i]) for i in idx], "relative_change": changes,
                           "max_relative_change": max(changes), "pass": bool(max(changes) < 1e-4)}
    log.info("measured %d modes, max steps %d", xi.size, int(rep.steps.max()))
    return rep
