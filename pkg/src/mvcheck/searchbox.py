"""Bounding boxes in log-odds space for the certified search.

Any parameter whose exact p-value reaches alpha - tau must, by the universal
bound rho <= m * P_p(r_hat), satisfy P_p(r_hat) >= t with t = (alpha - tau)/m.
The search may therefore be restricted to the superlevel set {log P >= log t}
of each observed outcome; this module computes an axis-aligned outer box for
the intersection of the two superlevel sets.

The per-axis extent of one superlevel set is read off the profile

    phi_a(x) = max over the other coordinates of log P_{p(u)}(r_hat),

a concave one-dimensional function. Maximizing out the other coordinates puts
each remaining category at its conditional maximum-likelihood weight, which
collapses the profile to a two-category problem on {axis, reference} up to an
additive constant, so the box tightening runs on one-dimensional superlevel
slices of collapsed outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSlice, DimensionMismatch, EmptyDomain, InvalidTolerance
from .multinomial import CountVector, OutcomeTable, _as_counts, log_kappa

# Outward rounding applied to every computed bound and to the final box.
_OUTWARD = 1e-6
# Endpoint bisection tolerance for superlevel slices.
_SLICE_XTOL = 1e-9


@dataclass(frozen=True)
class SearchDomain:
    """Axis-aligned box [lows, highs] in log-odds space plus its threshold."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]
    threshold: float

    def __post_init__(self) -> None:
        if len(self.lows) != len(self.highs):
            raise ValueError("lows and highs differ in length")
        for lo, hi in zip(self.lows, self.highs):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"degenerate box axis [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.lows)

    def contains(self, u) -> bool:
        return all(lo <= float(x) <= hi for x, lo, hi in zip(u, self.lows, self.highs))


def superlevel_threshold(alpha: float, tau: float, m: int) -> float:
    """Pruning threshold t = (alpha - tau) / m from the universal p-value bound."""
    if not 0.0 < alpha < 1.0:
        raise InvalidTolerance(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < tau < min(alpha, 1.0 - alpha):
        raise InvalidTolerance(f"tau must lie in (0, min(alpha, 1 - alpha)), got tau={tau}, alpha={alpha}")
    return (alpha - tau) / m


def _log1p_sumexp(coords) -> float:
    """log(1 + sum_j e^{x_j}), stable for large positive coordinates."""
    top = 0.0
    for x in coords:
        top = max(top, float(x))
    return top + math.log(math.exp(-top) + math.fsum(math.exp(float(x) - top) for x in coords))


def slice_value(
    r_hat: CountVector | tuple[int, ...],
    axis: int,
    fixed_coords,
    x: float,
) -> float:
    """log P_{p(u)}(r_hat) along one axis, the other coordinates held fixed."""
    counts = _as_counts(r_hat)
    k = len(counts)
    fixed = [float(v) for v in fixed_coords]
    if len(fixed) != k - 2:
        raise DimensionMismatch(f"expected {k - 2} fixed coordinates, got {len(fixed)}")
    u = fixed[:axis] + [float(x)] + fixed[axis:]
    n = sum(counts)
    linear = math.fsum(c * v for c, v in zip(counts[:-1], u))
    return log_kappa(counts) + linear - n * _log1p_sumexp(u)


def slice_maximizer(r_hat: CountVector | tuple[int, ...], axis: int, fixed_coords) -> float:
    """Closed-form maximizer of the slice: stationarity puts the axis category
    at weight r_a / n, giving x* = log(r_a * (1 + sum_{j != a} e^{u_j}) / (n - r_a)).
    """
    counts = _as_counts(r_hat)
    k = len(counts)
    if not 0 <= axis < k - 1:
        raise ValueError(f"axis must index a log-odds coordinate in [0, {k - 2}], got {axis}")
    fixed = [float(v) for v in fixed_coords]
    if len(fixed) != k - 2:
        raise DimensionMismatch(f"expected {k - 2} fixed coordinates, got {len(fixed)}")
    r_a, n = counts[axis], sum(counts)
    if r_a == 0 or r_a == n:
        raise DegenerateSlice(f"slice along axis {axis} has count {r_a} of {n}; maximizer is at infinity")
    return math.log(r_a) + _log1p_sumexp(fixed) - math.log(n - r_a)


def _bisect_outward(fun, inside: float, outside: float, log_threshold: float) -> float:
    """Shrink [inside, outside] across the crossing of ``fun == log_threshold``.

    Keeps fun(inside) >= log_threshold > fun(outside); returns the outside
    endpoint, so the reported interval contains the true superlevel interval.
    """
    while abs(outside - inside) > _SLICE_XTOL:
        mid = 0.5 * (inside + outside)
        if mid == inside or mid == outside:
            break
        if fun(mid) >= log_threshold:
            inside = mid
        else:
            outside = mid
    return outside


def superlevel_slice(
    r_hat: CountVector | tuple[int, ...],
    axis: int,
    fixed_coords,
    log_threshold: float,
) -> tuple[float, float] | None:
    """Outer enclosure of {x : slice_value(x) >= log_threshold}, or None if empty.

    The slice is concave with a closed-form maximizer; each endpoint is
    bracketed by outward doubling (the slice tends to -inf both ways) and
    bisected to absolute tolerance 1e-9, rounding outward.
    """
    counts = _as_counts(r_hat)
    center = slice_maximizer(counts, axis, fixed_coords)

    def fun(x: float) -> float:
        return slice_value(counts, axis, fixed_coords, x)

    if fun(center) < log_threshold:
        return None
    ends = []
    for direction in (-1.0, 1.0):
        step = 1.0
        while fun(center + direction * step) >= log_threshold:
            step *= 2.0
        inside = center if step == 1.0 else center + direction * (step / 2.0)
        ends.append(_bisect_outward(fun, inside, center + direction * step, log_threshold))
    return ends[0], ends[1]


def _inv_softplus(s: float) -> float:
    """Inverse of log(1 + e^x) for s > 0, stable at both extremes."""
    return s + math.log1p(-math.exp(-s))


def _axis_extent(counts: tuple[int, ...], axis: int, log_threshold: float) -> tuple[float, float] | None:
    """Per-axis extent of one outcome's superlevel set, as an outer interval.

    Infinite endpoints mark directions in which the set does not decay
    (zero count on the axis, or zero count on the reference category);
    None means the whole superlevel set is empty.
    """
    k = len(counts)
    n = sum(counts)
    r_a, r_k = counts[axis], counts[-1]
    # Additive constant of the profile: every other category at weight r_j / n,
    # the {axis, reference} pair carrying the rest of the mass.
    shift = log_kappa(counts)
    for j, c in enumerate(counts[:-1]):
        if j != axis and c > 0:
            shift += c * math.log(c / n)
    pair = r_a + r_k
    if pair > 0:
        shift += pair * math.log(pair / n)

    if r_a > 0 and r_k > 0:
        collapsed = (r_a, r_k)
        inner = superlevel_slice(collapsed, 0, (), log_threshold - (shift - log_kappa(collapsed)))
        if inner is None:
            return None
        return inner[0] - _OUTWARD, inner[1] + _OUTWARD
    if r_a == 0 and r_k == 0:
        # Profile is constant; the axis category never appears in either role.
        return (-math.inf, math.inf) if shift >= log_threshold else None
    gap = shift - log_threshold
    if gap <= 0.0:
        # The profile only approaches ``shift`` in the limit, never attains it.
        return None
    if r_a == 0:
        # Monotone decreasing profile: shift - r_k * log(1 + e^x).
        return -math.inf, _inv_softplus(gap / r_k) + _OUTWARD
    # r_k == 0: monotone increasing profile: shift - r_a * log(1 + e^{-x}).
    return -_inv_softplus(gap / r_a) - _OUTWARD, math.inf


def build_domain(
    r_a: CountVector | tuple[int, ...],
    r_b: CountVector | tuple[int, ...],
    alpha: float,
    tau: float,
    table: OutcomeTable,
) -> SearchDomain:
    """Outer box for the set where both outcomes pass the universal bound.

    Per axis, the box intersects the two outcomes' superlevel extents; joint
    support of the pair plus a jointly supported reference category makes at
    least one side of every axis finite. An axis whose category has zero
    count in BOTH outcomes is unbounded below for both; such an axis gets a
    fixed lower wall at log(tau / (2 n (k+1)^2)). Below the wall,
    rho(p) <= rho_reduced + n * e^{u_axis}, so any verdict there is covered,
    up to a slack well under tau, by the face problem with that category
    removed, which the face decomposition always runs separately.

    Raises EmptyDomain when some axis interval comes out empty: a valid
    early disjointness certificate via the universal bound.
    """
    a, b = _as_counts(r_a), _as_counts(r_b)
    if len(a) != len(b) or sum(a) != sum(b):
        raise DimensionMismatch(f"outcomes {a} and {b} do not share (n, k)")
    k, n = len(a), sum(a)
    if (table.n, table.k) != (n, k):
        raise DimensionMismatch(f"table is for (n={table.n}, k={table.k}), outcomes are (n={n}, k={k})")
    if a[-1] == 0 and b[-1] == 0:
        raise ValueError("reference category has zero count in both outcomes; permute a supported one last")
    t = superlevel_threshold(alpha, tau, table.m)
    log_t = math.log(t)
    strip_wall = math.log(tau) - math.log(2.0 * n * (k + 1) ** 2)

    lows, highs = [], []
    for axis in range(k - 1):
        lo, hi = -math.inf, math.inf
        for counts in (a, b):
            extent = _axis_extent(counts, axis, log_t)
            if extent is None:
                raise EmptyDomain(f"superlevel set of {counts} is empty at threshold {t}")
            lo = max(lo, extent[0])
            hi = min(hi, extent[1])
        if a[axis] == 0 and b[axis] == 0:
            lo = max(lo, strip_wall)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"axis {axis} extent is unbounded: [{lo}, {hi}]")  # joint support rules this out
        if lo > hi:
            raise EmptyDomain(f"axis {axis} extents of {a} and {b} do not overlap")
        lows.append(lo - _OUTWARD)
        highs.append(hi + _OUTWARD)
    return SearchDomain(lows=tuple(lows), highs=tuple(highs), threshold=t)
