"""Self-contained numerical kernel used by the risk modules.

Provides adaptive Gauss-Kronrod quadrature over finite and infinite
intervals, Brent-style scalar minimization, standard-normal special
functions, the sampling density of the scaled sample standard deviation,
and seeded normal sampling with reproducible substreams.

All routines are pure functions of their arguments and safe to call from
any number of concurrent workers.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import log_ndtr, ndtr


class NumericsError(Exception):
    """Base class for numerical failures raised by this package."""


class QuadratureError(NumericsError):
    """Adaptive quadrature did not reach the requested tolerance."""


class MinimizationError(NumericsError):
    """Scalar minimization failed (bad bracket or edge minimum)."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Error targets for adaptive quadrature.

    The integral estimate I is accepted once the accumulated error bound
    drops below ``max(abs_tol, rel_tol * |I|)``.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 512

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class MinimizeResult:
    argmin: float
    min_value: float
    iterations: int


# 15-point Kronrod extension of 7-point Gauss-Legendre, nodes/weights for
# [-1, 1].  The embedded Gauss rule sits on nodes 1, 3, ..., 13.
_K15_NODES_POS = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_K15_WEIGHTS_POS = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_G7_WEIGHTS_POS = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

_K15_NODES = np.concatenate((-_K15_NODES_POS[:-1], _K15_NODES_POS[::-1]))
_K15_WEIGHTS = np.concatenate((_K15_WEIGHTS_POS[:-1], _K15_WEIGHTS_POS[::-1]))
_G7_INDEX = np.arange(1, 14, 2)
_G7_WEIGHTS = np.concatenate((_G7_WEIGHTS_POS[:-1], _G7_WEIGHTS_POS[::-1]))

_EPS = float(np.finfo(float).eps)


def _vectorized(f: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap f so it always maps an ndarray of points to an ndarray of values."""

    def call(x: np.ndarray) -> np.ndarray:
        try:
            y = np.asarray(f(x), dtype=float)
        except (TypeError, ValueError):
            y = None
        if y is None or y.shape != x.shape:
            y = np.fromiter((float(f(float(t))) for t in x), dtype=float, count=x.size)
        return y

    return call


def _gk15(f: Callable, lo: float, hi: float) -> tuple[float, float]:
    """One Gauss-Kronrod panel: returns (integral, error bound)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    y = f(mid + half * _K15_NODES)
    resk = half * float(_K15_WEIGHTS @ y)
    resg = half * float(_G7_WEIGHTS @ y[_G7_INDEX])
    resabs = half * float(_K15_WEIGHTS @ np.abs(y))
    mean = resk / (hi - lo)
    resasc = half * float(_K15_WEIGHTS @ np.abs(y - mean))
    err = abs(resk - resg)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    err = max(err, 50.0 * _EPS * resabs)
    return resk, err


def _map_infinite(f, lo: float, hi: float, points: Sequence[float]):
    """Transform an infinite integration range onto a finite one.

    (-inf, inf) maps through x = t/(1-t^2) on (-1, 1); half-infinite ranges
    map through x = a + t/(1-t) on (0, 1).  Interior breakpoints are carried
    through the inverse map.
    """
    if math.isinf(lo) and math.isinf(hi):
        def g(t):
            d = 1.0 - t * t
            return f(t / d) * (1.0 + t * t) / (d * d)

        def inv(x):
            if x == 0.0:
                return 0.0
            return (-1.0 + math.sqrt(1.0 + 4.0 * x * x)) / (2.0 * x)

        return g, -1.0, 1.0, [inv(p) for p in points]
    if math.isinf(hi):
        a = lo

        def g(t):
            d = 1.0 - t
            return f(a + t / d) / (d * d)

        return g, 0.0, 1.0, [(p - a) / (1.0 + (p - a)) for p in points]
    b = hi

    def g(t):
        d = 1.0 - t
        return f(b - t / d) / (d * d)

    return g, 0.0, 1.0, [(b - p) / (1.0 + (b - p)) for p in points]


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    points: Sequence[float] = (),
) -> float:
    """Adaptively integrate f over (lo, hi).

    Endpoints may be infinite.  The integrand is evaluated on arrays of
    interior nodes when it supports that, pointwise otherwise.  `points`
    lists interior locations of known structure (kinks, support edges) and
    seeds the initial subdivision.  Panels only sample interior nodes, so
    a feature much narrower than the surrounding panel must be bracketed
    by a pair of points, not merely marked at its center.

    Raises QuadratureError when the error bound cannot be brought below
    max(abs_tol, rel_tol * |I|) within cfg.max_subdivisions.
    """
    if not lo < hi:
        raise ValueError(f"invalid interval: lo={lo!r} must be < hi={hi!r}")
    fv = _vectorized(f)
    if math.isinf(lo) or math.isinf(hi):
        fv, lo, hi, points = _map_infinite(fv, lo, hi, points)

    cuts = sorted({lo, hi, *(p for p in points if lo < p < hi)})
    total = 0.0
    err_total = 0.0
    heap: list[tuple[float, float, float, float, float]] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, err = _gk15(fv, a, b)
        total += val
        err_total += err
        heapq.heappush(heap, (-err, a, b, val, err))

    splits = 0
    while err_total > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        if splits >= cfg.max_subdivisions:
            raise QuadratureError(
                f"no convergence after {splits} subdivisions: "
                f"estimate {total:.6g}, error bound {err_total:.3g}"
            )
        _, a, b, val, err = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        v1, e1 = _gk15(fv, a, mid)
        v2, e2 = _gk15(fv, mid, b)
        total += v1 + v2 - val
        err_total += e1 + e2 - err
        heapq.heappush(heap, (-e1, a, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, b, v2, e2))
        splits += 1
    return total


_INV_GOLD = 0.3819660112501051  # 2 - golden ratio


def minimize_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-6,
    max_iter: int = 500,
) -> MinimizeResult:
    """Minimize a unimodal f on [lo, hi] by Brent's method.

    Combines golden-section steps with parabolic interpolation; requires no
    derivatives.  Raises MinimizationError when the minimizer lands at a
    bracket edge (the bracket then does not enclose a minimum) or when the
    iteration budget runs out.
    """
    if not lo < hi:
        raise ValueError(f"invalid bracket: lo={lo!r} must be < hi={hi!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")

    a, b = float(lo), float(hi)
    x = w = v = a + _INV_GOLD * (b - a)
    fx = fw = fv = float(f(x))
    d = e = b - a

    for iteration in range(1, max_iter + 1):
        m = 0.5 * (a + b)
        tol1 = tol + 4.0 * _EPS * abs(x)
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            if min(x - lo, hi - x) < 2.0 * tol2:
                raise MinimizationError(
                    f"minimum at bracket edge x={x:.8g}; bracket ({lo}, {hi}) "
                    "does not enclose an interior minimum"
                )
            return MinimizeResult(argmin=x, min_value=fx, iterations=iteration)

        use_golden = True
        if abs(e) > tol1:
            # parabola through (x, w, v)
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            e_prev, e = e, d
            if abs(p) < abs(0.5 * q * e_prev) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < m else -tol1
                use_golden = False
        if use_golden:
            e = (b if x < m else a) - x
            d = _INV_GOLD * e

        u = x + (d if abs(d) >= tol1 else (tol1 if d > 0 else -tol1))
        fu = float(f(u))
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu

    raise MinimizationError(f"no convergence within {max_iter} iterations")


_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def std_normal_pdf(x):
    """Standard normal density, elementwise on arrays."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x - _LOG_SQRT_2PI)
    return float(out) if out.ndim == 0 else out


def std_normal_cdf(x):
    """Standard normal distribution function, elementwise on arrays."""
    out = ndtr(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def std_normal_logcdf(x):
    """log of the standard normal cdf, accurate far into the left tail."""
    out = log_ndtr(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def normal_mass(a, b):
    """Standard normal probability of the interval (a, b)."""
    return std_normal_cdf(b) - std_normal_cdf(a)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for positive real x."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def scaled_chi_log_const(n: int) -> float:
    """Log normalizing constant of the scaled-chi density for sample size n."""
    nu = n - 1
    return math.log(2.0) + 0.5 * nu * math.log(0.5 * nu) - math.lgamma(0.5 * nu)


def scaled_chi_pdf(n: int, z):
    """Density of Z = sigma_hat/sigma for a normal sample of size n.

    Z^2 follows chi-square with n-1 degrees of freedom divided by n-1; the
    density concentrates at 1 as n grows.  Zero for z <= 0.
    """
    if n < 2:
        raise ValueError(f"scaled_chi_pdf requires n >= 2, got {n}")
    z = np.asarray(z, dtype=float)
    c = scaled_chi_log_const(n)
    safe = np.where(z > 0, z, 1.0)
    out = np.where(
        z > 0,
        np.exp(c + (n - 2) * np.log(safe) - 0.5 * (n - 1) * safe * safe),
        0.0,
    )
    return float(out) if out.ndim == 0 else out


def scaled_chi_interval(n: int, log_drop: float = 40.0) -> tuple[float, float]:
    """Interval carrying all but a negligible tail of the scaled-chi mass.

    Returns (lo, hi) such that the density outside is below exp(-log_drop)
    times its peak; the discarded probability is far below quadrature
    tolerances for log_drop around 40.
    """
    if n < 2:
        raise ValueError(f"scaled_chi_interval requires n >= 2, got {n}")

    def logpdf(z):
        return (n - 2) * math.log(z) - 0.5 * (n - 1) * z * z

    mode = scaled_chi_mode(n)
    peak = 0.0 if n == 2 else logpdf(mode)
    target = peak - log_drop

    if n == 2:
        lo = 0.0  # decreasing half-normal: the peak sits at the origin
    else:
        zl, zr = mode * 1e-300, mode
        if logpdf(zl) >= target:
            lo = 0.0
        else:
            for _ in range(120):
                zm = 0.5 * (zl + zr)
                if logpdf(zm) < target:
                    zl = zm
                else:
                    zr = zm
            lo = zl

    zl = mode if n > 2 else 1e-12
    zr = mode + math.sqrt(2.0 * (log_drop + 10.0) / (n - 1)) + 1.0
    for _ in range(120):
        zm = 0.5 * (zl + zr)
        if logpdf(zm) < target:
            zr = zm
        else:
            zl = zm
    return lo, zr


def scaled_chi_inverse_mean(n: int) -> float:
    """E(1/Z) for the scaled-chi variable: exact gamma-function ratio."""
    if n < 3:
        raise ValueError(f"scaled_chi_inverse_mean requires n >= 3, got {n}")
    return math.sqrt(0.5 * (n - 1)) * math.exp(
        math.lgamma(0.5 * (n - 2)) - math.lgamma(0.5 * (n - 1))
    )


def scaled_chi_mode(n: int) -> float:
    """Mode of the scaled-chi density (0 for n = 2)."""
    if n < 2:
        raise ValueError(f"scaled_chi_mode requires n >= 2, got {n}")
    if n == 2:
        return 0.0
    return math.sqrt((n - 2) / (n - 1))


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent, reproducible generator for one replicate index.

    Streams with distinct indices never overlap; results are therefore
    independent of how replicates are scheduled across workers.
    """
    if index < 0:
        raise ValueError("substream index must be nonnegative")
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def sample_standard_normals(seed: int, count: int) -> np.ndarray:
    """Deterministic standard normal sample of the given size."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    return substream(seed, 0).standard_normal(count)
