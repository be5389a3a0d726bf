"""Two settings beyond density estimation where simple nonparametric
estimators beat parametric ones at small sample sizes.

Lognormal mean estimation: the sample mean competes with the closed-form
maximum-likelihood plug-in.  For every log-scale spread there is a largest
sample size up to which the sample mean has the smaller MSE; the plug-in
MSE does not even exist until the sample is large enough.

Skew-extended normal family: adding a shape parameter to the normal family
inflates the asymptotic MISE constant of the plug-in density estimator at
normal truths by a factor of about 1.386.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import (
    DEFAULT_QUADRATURE,
    NumericsError,
    QuadratureConfig,
    std_normal_logcdf,
)
from .parametric import asymptotic_mise_general


@dataclass(frozen=True)
class LognormalParams:
    """Location and spread of the log of a lognormal variable."""

    log_mean: float
    log_sd: float

    def __post_init__(self) -> None:
        if not self.log_sd > 0:
            raise ValueError(f"log_sd must be positive, got {self.log_sd!r}")

    @property
    def mean(self) -> float:
        return math.exp(self.log_mean + 0.5 * self.log_sd**2)


@dataclass(frozen=True)
class CrossoverResult:
    """Largest sample size at which the sample mean still wins."""

    log_sd: float
    n_crossover: int

    def __post_init__(self) -> None:
        if self.n_crossover < 1:
            raise ValueError("n_crossover must be at least 1")


def lognormal_mse_nonparametric(p: LognormalParams, n: int) -> float:
    """Exact MSE of the sample mean (it is unbiased, so this is its variance)."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    b2 = p.log_sd**2
    return math.exp(2.0 * p.log_mean + b2) * (math.exp(b2) - 1.0) / n


def lognormal_mse_parametric(p: LognormalParams, n: int) -> float:
    """Exact MSE of the maximum-likelihood plug-in estimator of the mean.

    Finite only when the squared log-spread is below (n-1)/2; below that
    sample size the estimator has no second moment and the MSE is infinite
    (returned as a value, not an error).
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    b2 = p.log_sd**2
    if b2 >= 0.5 * (n - 1):
        return math.inf
    lead = math.exp(2.0 * p.log_mean + b2 / n)
    return lead * (
        math.exp(b2 / n) * (1.0 - 2.0 * b2 / (n - 1)) ** (-0.5 * (n - 1))
        - (1.0 - b2 / (n - 1)) ** (-(n - 1.0))
    )


def lognormal_variance_ratio_limit(log_sd: float) -> float:
    """Large-n limit of Var(sample mean) / Var(plug-in); always above one."""
    if not log_sd > 0:
        raise ValueError("log_sd must be positive")
    b2 = log_sd**2
    return (math.exp(b2) - 1.0) / (b2 + 0.5 * b2 * b2)


def lognormal_crossover(
    log_sd: float, max_n: int = 10**6, verify_window: int = 200
) -> CrossoverResult:
    """Largest n at which the sample mean beats the parametric estimator.

    Scans upward from n = 2 using the exact MSE formulas (an infinite
    parametric MSE counts as a loss), then re-verifies that the parametric
    estimator stays ahead over the next `verify_window` sample sizes.
    """
    p = LognormalParams(0.0, log_sd)
    n = 2
    while n <= max_n:
        if lognormal_mse_parametric(p, n) < lognormal_mse_nonparametric(p, n):
            n_crossover = n - 1
            for k in range(n + 1, n + 1 + verify_window):
                if not lognormal_mse_parametric(p, k) < lognormal_mse_nonparametric(p, k):
                    raise NumericsError(
                        f"crossover at n={n_crossover} is not clean: parametric "
                        f"loses again at n={k}"
                    )
            return CrossoverResult(log_sd=log_sd, n_crossover=n_crossover)
        n += 1
    raise NumericsError(f"no crossover found below n={max_n} for log_sd={log_sd}")


def skew_normal_density(x, theta) -> float:
    """Density of the skew-extended normal family.

    theta = (location, scale, shape); shape 1 recovers the plain normal.
    Evaluated through logs so extreme arguments stay finite.
    """
    loc, scale, shape = theta
    if not scale > 0 or not shape > 0:
        raise ValueError("scale and shape must be positive")
    x = np.asarray(x, dtype=float)
    y = (x - loc) / scale
    log_val = (
        math.log(shape)
        + (shape - 1.0) * std_normal_logcdf(y)
        - 0.5 * y * y
        - 0.5 * math.log(2.0 * math.pi)
        - math.log(scale)
    )
    out = np.exp(log_val)
    return float(out) if out.ndim == 0 else out


def skew_normal_score(x, theta) -> np.ndarray:
    """Gradient of the log density in (location, scale, shape).

    The shape component is 1/shape + log cdf, which stays accurate far into
    the left tail through the log-cdf implementation.  At shape 1 the
    location and scale components reduce to the plain normal scores.
    """
    loc, scale, shape = theta
    if not scale > 0 or not shape > 0:
        raise ValueError("scale and shape must be positive")
    y = (np.asarray(x, dtype=float) - loc) / scale
    logcdf = std_normal_logcdf(y)
    # phi(y)/Phi(y), computed in logs to survive y << 0
    hazard = np.exp(-0.5 * y * y - 0.5 * math.log(2.0 * math.pi) - logcdf)
    u_loc = (y - (shape - 1.0) * hazard) / scale
    u_scale = (y * y - 1.0 - (shape - 1.0) * y * hazard) / scale
    u_shape = 1.0 / shape + logcdf
    return np.array([u_loc, u_scale, u_shape])


def skew_normal_asymptotic_mise(
    sigma: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Limit of n * MISE for the skew-extended family at a normal truth.

    Roughly 0.342/sigma: about 1.386 times the two-parameter normal value,
    the price of estimating the extra shape parameter.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    theta = (0.0, sigma, 1.0)
    span = 12.0 * sigma
    return asymptotic_mise_general(
        lambda x, th: skew_normal_score(x, th),
        lambda x, th: skew_normal_density(x, th),
        theta,
        cfg=cfg,
        support=(-span, span),
    )
