"""Small numerical helpers used across modules."""

from __future__ import annotations

import concurrent.futures
import functools
import logging
import math
import pickle

import numpy as np

from .errors import DomainError

log = logging.getLogger("hypwp")


def bracket(x) -> float:
    """Japanese bracket <x> = sqrt(1 + x^2)."""
    return math.hypot(1.0, float(x))


def iterated_logs(first: float, depth: int) -> list[float]:
    """Return [l_1, ..., l_depth] with l_1 = first and l_k = log l_{k-1}.

    Every level that still has to be logged must be positive, otherwise a
    DomainError names the failing level.
    """
    out = []
    cur = first
    for k in range(1, depth + 1):
        if k > 1:
            if cur <= 0.0:
                raise DomainError(f"iterated log undefined at level {k}: argument {cur!r} <= 0")
            cur = math.log(cur)
        out.append(cur)
    return out


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise DomainError("loglog_slope needs two equally sized series with >= 2 points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("loglog_slope needs positive data")
    lx, ly = np.log(x), np.log(y)
    return float(np.polyfit(lx, ly, 1)[0])


def linear_slope(x, y) -> float:
    """Least-squares slope of y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    return float(np.polyfit(lx, np.asarray(y, dtype=float), 1)[0])


def central_diff(f, x: float, h: float) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


# Cutoff: 1 on (-inf, 1], 0 on [2, inf), septic smoothstep in between.
# With y = s - 1 in (0, 1) the cutoff is 1 - S(y), where
#   S(y) = 35 y^4 - 84 y^5 + 70 y^6 - 20 y^7
# is the C^3 smoothstep (S(0)=0, S(1)=1, first three derivatives vanish at both ends).
_SMOOTHSTEP = (0.0, 0.0, 0.0, 0.0, 35.0, -84.0, 70.0, -20.0)
_SMOOTHSTEP_D = tuple(k * c for k, c in enumerate(_SMOOTHSTEP))[1:]


def _horner(coeffs, y):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * y + c
    return acc


def cutoff(s: float) -> float:
    """Smooth cutoff: 1 for s <= 1, 0 for s >= 2."""
    if s <= 1.0:
        return 1.0
    if s >= 2.0:
        return 0.0
    return 1.0 - _horner(_SMOOTHSTEP, s - 1.0)


def cutoff_derivative(s: float) -> float:
    if s <= 1.0 or s >= 2.0:
        return 0.0
    return -_horner(_SMOOTHSTEP_D, s - 1.0)


@functools.lru_cache(maxsize=16)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _picklable(obj) -> bool:
    try:
        pickle.dumps(obj)
    except Exception:
        return False
    return True


def parallel_map(fn, items, workers: int = 1) -> list:
    """Ordered map, optionally over a process pool.

    The result order always matches ``items`` so output does not depend on
    the worker count. Unpicklable work falls back to a serial loop.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    if not (_picklable(fn) and _picklable(items)):
        log.warning("work items are not picklable; running serially")
        return [fn(it) for it in items]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def fmt(x) -> str:
    """Render a float with 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")
