"""Asymptotic likelihood-ratio (Wilks) confidence regions.

The deviance of counts ``n_i`` against a parameter ``p`` is

    G2(p) = 2 * sum_i n_i * log(n_i / (n * p_i)),   0 * log 0 = 0,

and the asymptotic region keeps every p with G2(p) at most the chi-square
quantile with k - 1 degrees of freedom. This is the non-certified baseline:
region membership is exact, but the intersection check is a dense grid scan
(both regions are convex sublevel sets, so a fine scan is reliable at small
n and k, without being a certificate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .multinomial import CountVector, SimplexPoint, _as_counts, _as_probs, simplex_centroid_grid

_GAMMA_EPS = 1e-15
_GAMMA_MAX_ITER = 10_000


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma by series, for x < a + 1."""
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_GAMMA_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma by continued fraction, for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_lower_gamma(a: float, x: float) -> float:
    """P(a, x), the chi-square CDF building block."""
    if a <= 0.0:
        raise ValueError(f"shape must be positive, got {a}")
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        return min(_lower_gamma_series(a, x), 1.0)
    return max(1.0 - _upper_gamma_cf(a, x), 0.0)


def chisq_cdf(df: int, x: float) -> float:
    return regularized_lower_gamma(df / 2.0, x / 2.0)


def chisq_quantile(df: int, prob: float) -> float:
    """Inverse chi-square CDF by bisection to absolute tolerance 1e-10.

    For df = 2 the closed form is -2 log(1 - prob), used by tests as a
    cross-check.
    """
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if not 0.0 < prob < 1.0:
        raise ValueError(f"prob must lie in (0, 1), got {prob}")
    hi = 1.0
    while chisq_cdf(df, hi) < prob:
        hi *= 2.0
        if hi > 1e9:
            raise ArithmeticError("quantile bracket failed to close")
    lo = 0.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if chisq_cdf(df, mid) < prob:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class WilksRegion:
    """The asymptotic confidence region of one observed outcome."""

    counts: tuple[int, ...]
    alpha: float
    threshold: float

    @classmethod
    def build(cls, r_hat: CountVector | tuple[int, ...], alpha: float) -> "WilksRegion":
        counts = _as_counts(r_hat)
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        return cls(counts=counts, alpha=alpha, threshold=chisq_quantile(len(counts) - 1, 1.0 - alpha))


def deviance(r_hat: CountVector | tuple[int, ...], p: SimplexPoint | tuple[float, ...]) -> float:
    """G2 statistic; +inf when p zeroes out an observed category."""
    counts = _as_counts(r_hat)
    probs = _as_probs(p)
    if len(counts) != len(probs):
        raise DimensionMismatch(f"outcome has {len(counts)} categories, point has {len(probs)}")
    n = sum(counts)
    total = 0.0
    for c, x in zip(counts, probs):
        if c == 0:
            continue
        if x == 0.0:
            return math.inf
        total += c * math.log(c / (n * x))
    return 2.0 * total


def wilks_member(region: WilksRegion, p: SimplexPoint | tuple[float, ...]) -> bool:
    return deviance(region.counts, p) <= region.threshold


def _grid_deviance(counts: tuple[int, ...], grid: np.ndarray) -> np.ndarray:
    n = sum(counts)
    total = np.zeros(grid.shape[0])
    for i, c in enumerate(counts):
        if c == 0:
            continue
        total += c * np.log(c / (n * grid[:, i]))
    return 2.0 * total


def wilks_intersect(
    r_a: CountVector | tuple[int, ...],
    r_b: CountVector | tuple[int, ...],
    alpha: float,
    resolution: int = 400,
) -> bool:
    """Grid-scan overlap test of the two asymptotic regions."""
    a, b = _as_counts(r_a), _as_counts(r_b)
    if len(a) != len(b) or sum(a) != sum(b):
        raise DimensionMismatch(f"outcomes {a} and {b} do not share (n, k)")
    threshold = chisq_quantile(len(a) - 1, 1.0 - alpha)
    grid = simplex_centroid_grid(len(a), resolution)
    inside = (_grid_deviance(a, grid) <= threshold) & (_grid_deviance(b, grid) <= threshold)
    return bool(inside.any())
