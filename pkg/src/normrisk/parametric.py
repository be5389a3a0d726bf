"""Risk of normality-based parametric density estimators.

Covers the plug-in estimator (estimated mean and standard deviation
substituted into the normal density), the minimum-variance unbiased
density estimator, the shrinkage correction, and the asymptotic trace
formula for general smooth parametric families.

Every risk here reduces to the standard normal estimand: a general
(mu, sigma) target only rescales the answer, so the quadrature work is
done once in standardized coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .numerics import (
    DEFAULT_QUADRATURE,
    NumericsError,
    QuadratureConfig,
    integrate,
    log_gamma,
    scaled_chi_interval,
    scaled_chi_inverse_mean,
    scaled_chi_log_const,
    scaled_chi_mode,
    scaled_chi_pdf,
    std_normal_pdf,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)
TWO_SQRT_PI = 2.0 * math.sqrt(math.pi)

#: integral of the squared standard normal density
NORMAL_ROUGHNESS = 1.0 / TWO_SQRT_PI

#: limit of n * sigma * MISE for the plug-in estimator
PLUGIN_AMISE_CONSTANT = 7.0 / (16.0 * math.sqrt(math.pi))


@dataclass(frozen=True)
class NormalParams:
    """Location and scale of the normal density being estimated."""

    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


STD_NORMAL = NormalParams(0.0, 1.0)


@dataclass(frozen=True)
class PluginEstimate:
    """Estimated location and scale plugged into the normal density."""

    mu_hat: float
    sigma_hat: float

    def __post_init__(self) -> None:
        if not self.sigma_hat > 0:
            raise ValueError(f"sigma_hat must be positive, got {self.sigma_hat!r}")


@dataclass(frozen=True)
class MiseReport:
    """Integrated squared error expectation and how it was obtained."""

    value: float
    method: str  # closed_form | quadrature | monte_carlo
    std_error: Optional[float] = None

    def __post_init__(self) -> None:
        if self.method not in ("closed_form", "quadrature", "monte_carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.value >= 0):
            raise ValueError(f"MISE value must be nonnegative, got {self.value!r}")
        if self.std_error is not None and not (self.std_error >= 0):
            raise ValueError("std_error must be nonnegative")


class MseParts(NamedTuple):
    bias: float
    variance: float
    mse: float


def plugin_density(x, est: PluginEstimate):
    """Normal density with estimated parameters, evaluated at x."""
    return std_normal_pdf((np.asarray(x, dtype=float) - est.mu_hat) / est.sigma_hat) / est.sigma_hat


def asymptotic_mse_plugin(x: float, p: NormalParams, n: int) -> float:
    """Leading-order pointwise MSE of the plug-in estimator.

    The two parts of the formula reflect the noise in the estimated mean
    and in the estimated standard deviation.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    y = (x - p.mu) / p.sigma
    phi = std_normal_pdf(y)
    return phi * phi * (y * y + 0.5 * (y * y - 1.0) ** 2) / (n * p.sigma * p.sigma)


def asymptotic_mise_plugin(p: NormalParams, n: int) -> float:
    """Leading-order MISE of the plug-in estimator."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return PLUGIN_AMISE_CONSTANT / (n * p.sigma)


def conditional_moments(x, n: int, z):
    """Mean and second moment of the plug-in density value at x, given
    that the scale estimate equals z times the true scale.

    Standard normal estimand; elementwise over arrays of x or z.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise ValueError("z must be positive")
    nz2 = n * z * z
    mean = math.sqrt(n) / (SQRT_2PI * np.sqrt(1.0 + nz2)) * np.exp(-0.5 * x * x * n / (1.0 + nz2))
    second = math.sqrt(n) / (2.0 * math.pi * z * np.sqrt(2.0 + nz2)) * np.exp(-x * x * n / (2.0 + nz2))
    if mean.ndim == 0:
        return float(mean), float(second)
    return mean, second


def _mean_integrand(y: float, n: int):
    def f(z):
        nz2 = n * z * z
        cm = math.sqrt(n) / (SQRT_2PI * np.sqrt(1.0 + nz2)) * np.exp(-0.5 * y * y * n / (1.0 + nz2))
        return cm * scaled_chi_pdf(n, z)

    return f

def _second_integrand(y: float, n: int):
    # combined in log space: the 1/z factor of the conditional second moment
    # cancels against one power of z in the sampling density, so the
    # integrand stays finite as z -> 0 for every n >= 3
    log_c = scaled_chi_log_const(n) + 0.5 * math.log(n) - math.log(2.0 * math.pi)

    def f(z):
        nz2 = n * z * z
        return np.exp(
            log_c
            + (n - 3) * np.log(z)
            - 0.5 * np.log(2.0 + nz2)
            - y * y * n / (2.0 + nz2)
            - 0.5 * (n - 1) * z * z
        )

    return f


def exact_mse_plugin(
    x: float, p: NormalParams, n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> MseParts:
    """Exact pointwise bias, variance and MSE of the plug-in estimator.

    Integrates the conditional moments against the scaled-chi law of the
    scale estimate.  Requires n >= 3: below that the second moment is not
    integrable.
    """
    if n < 3:
        raise ValueError(f"exact plug-in risk requires n >= 3, got {n}")
    y = (x - p.mu) / p.sigma
    z_lo, z_hi = scaled_chi_interval(n)
    mode = scaled_chi_mode(n)
    mean0 = integrate(_mean_integrand(y, n), z_lo, z_hi, cfg, points=(mode,))
    second0 = integrate(_second_integrand(y, n), 0.0, z_hi, cfg, points=(z_lo, mode))
    bias = (mean0 - std_normal_pdf(y)) / p.sigma
    variance = (second0 - mean0 * mean0) / (p.sigma * p.sigma)
    return MseParts(bias=bias, variance=variance, mse=bias * bias + variance)


@lru_cache(maxsize=None)
def _mise_coefficient(n: int, cfg: QuadratureConfig) -> float:
    z_lo, z_hi = scaled_chi_interval(n)

    def f(z):
        return np.sqrt(2.0 * n / (1.0 + n * (1.0 + z * z))) * scaled_chi_pdf(n, z)

    cross = integrate(f, z_lo, z_hi, cfg, points=(scaled_chi_mode(n),))
    return n * (1.0 + scaled_chi_inverse_mean(n) - 2.0 * cross)


def plugin_mise_coefficient(n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """The stabilized MISE sequence: n * 2*sqrt(pi) * sigma * MISE.

    Decreases slowly and monotonically to 7/8 as n grows.
    """
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    return _mise_coefficient(n, cfg)


def exact_mise_plugin(
    p: NormalParams, n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> MiseReport:
    """Exact MISE of the plug-in estimator, by quadrature."""
    value = plugin_mise_coefficient(n, cfg) / (n * TWO_SQRT_PI * p.sigma)
    return MiseReport(value=value, method="quadrature")


def plugin_mise_expansion_residual(n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Scaled gap between the MISE coefficient and its two-term expansion
    7/8 + (271/96)/n, multiplied by n^2."""
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    coeff = plugin_mise_coefficient(n, cfg)
    return n * n * abs(coeff - 7.0 / 8.0 - (271.0 / 96.0) / n)


def _log_support_const(n: int) -> float:
    # normalizing constant of the standardized-residual density; shared by
    # the unbiased density estimator and the ancillary-density module
    return (
        log_gamma(0.5 * (n - 1))
        - 0.5 * math.log(math.pi)
        - log_gamma(0.5 * (n - 2))
        + 0.5 * math.log(n)
        - math.log(n - 1)
    )


def umvu_density(x, est: PluginEstimate, n: int):
    """Unbiased estimator of the normal density value at x.

    A polynomial in the standardized residual, supported on the random
    interval |x - mu_hat| <= sigma_hat * (n-1)/sqrt(n) and zero outside.
    For n = 4 the exponent vanishes and the estimate is a rescaled
    indicator of that interval; n < 4 is rejected.
    """
    if n < 4:
        raise ValueError(f"unbiased density estimator requires n >= 4, got {n}")
    x = np.asarray(x, dtype=float)
    r = (x - est.mu_hat) / est.sigma_hat
    edge = (n - 1) / math.sqrt(n)
    const = math.exp(_log_support_const(n)) / est.sigma_hat
    t = np.maximum(1.0 - n * r * r / (n - 1) ** 2, 0.0)
    out = np.where(np.abs(r) <= edge, const * np.power(t, 0.5 * n - 2.0), 0.0)
    return float(out) if out.ndim == 0 else out


def exact_mise_umvu(p: NormalParams, n: int) -> MiseReport:
    """Exact MISE of the unbiased density estimator, in closed form.

    At n = 3 the value is infinite (reported as such, not an error);
    the estimator requires n >= 3 to be defined at all.
    """
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    if n == 3:
        return MiseReport(value=math.inf, method="closed_form")
    log_first = (
        math.log(scaled_chi_inverse_mean(n))
        + 2.0 * _log_support_const(n)
        + math.log(n - 1)
        - 0.5 * math.log(n)
        + log_gamma(n - 3)
        + 0.5 * math.log(math.pi)
        - log_gamma(n - 2.5)
    )
    value = (math.exp(log_first) - NORMAL_ROUGHNESS) / p.sigma
    return MiseReport(value=value, method="closed_form")


def shrink_factor(mise: float, r_f: float) -> float:
    """Optimal multiplicative shrinkage for an unbiased density estimator."""
    if mise < 0 or not r_f > 0:
        raise ValueError("mise must be nonnegative and r_f positive")
    if math.isinf(mise):
        return 0.0
    return r_f / (mise + r_f)


def shrunk_mise(mise: float, r_f: float) -> float:
    """MISE after optimal shrinkage; never exceeds the original."""
    if mise < 0 or not r_f > 0:
        raise ValueError("mise must be nonnegative and r_f positive")
    if math.isinf(mise):
        return r_f
    return mise * r_f / (r_f + mise)


def _finite_difference_score(
    density: Callable[[float, Sequence[float]], float], step: float
) -> Callable[[float, Sequence[float]], np.ndarray]:
    def score(x, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.empty(theta.size)
        for k in range(theta.size):
            up = theta.copy()
            dn = theta.copy()
            up[k] += step
            dn[k] -= step
            out[k] = (math.log(density(x, up)) - math.log(density(x, dn))) / (2.0 * step)
        return out

    return score


def asymptotic_mise_general(
    score: Optional[Callable[[float, Sequence[float]], np.ndarray]],
    density: Callable[[float, Sequence[float]], float],
    theta: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    support: tuple[float, float] = (-math.inf, math.inf),
    fd_step: float = 1e-5,
) -> float:
    """Limit of n * MISE for a maximum-likelihood plug-in density estimator.

    Returns Tr(J^-1 L) with J the Fisher information and L the squared-
    density-weighted score outer product, both computed by quadrature at
    theta.  When no analytic score is supplied it is approximated by
    central differences of log density (step `fd_step`), with a matching
    loss of accuracy.
    """
    theta = np.asarray(theta, dtype=float)
    dim = theta.size
    score_fn = score if score is not None else _finite_difference_score(density, fd_step)
    lo, hi = support

    j_mat = np.empty((dim, dim))
    l_mat = np.empty((dim, dim))
    for i in range(dim):
        for k in range(i, dim):
            def f_j(x, i=i, k=k):
                u = score_fn(x, theta)
                return density(x, theta) * u[i] * u[k]

            def f_l(x, i=i, k=k):
                u = score_fn(x, theta)
                return density(x, theta) ** 2 * u[i] * u[k]

            j_mat[i, k] = j_mat[k, i] = integrate(f_j, lo, hi, cfg)
            l_mat[i, k] = l_mat[k, i] = integrate(f_l, lo, hi, cfg)

    cond = np.linalg.cond(j_mat)
    if not np.isfinite(cond) or cond > 1e12:
        raise NumericsError(
            f"Fisher information matrix is singular or ill-conditioned (cond={cond:.3g})"
        )
    return float(np.trace(np.linalg.solve(j_mat, l_mat)))
