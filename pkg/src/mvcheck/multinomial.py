"""Exact multinomial probabilities and p-values.

Everything here works in the log domain. For an outcome ``r`` with
``sum(r) == n`` over ``k`` categories and a parameter ``p`` on the simplex,

    log P_p(r) = log kappa(r) + sum_i r_i * log(p_i)

with ``kappa(r) = n! / prod_i r_i!`` and the convention ``0 * log 0 = 0``.
The exact p-value of an observed outcome ``r_hat`` at ``p`` sums the
probabilities of all outcomes that are no more probable than ``r_hat``:

    rho(p) = sum over { q : P_p(q) <= P_p(r_hat) } of P_p(q)

Ties are included; the comparison is done on log-probabilities with no
epsilon, and two ``-inf`` values compare equal.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, InvalidDimension

DEFAULT_MAX_OUTCOMES = 5_000_000
_BUDGET_ENV_VAR = "MVC_MAX_OUTCOMES"


@dataclass(frozen=True)
class CountVector:
    """An observed outcome: non-negative integer counts over k >= 2 categories."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) < 2:
            raise InvalidDimension(f"need at least 2 categories, got {len(counts)}")
        if any(c < 0 for c in counts):
            raise ValueError(f"counts must be non-negative, got {counts}")
        if sum(counts) < 1:
            raise ValueError("sample size must be positive")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class SimplexPoint:
    """A parameter on the closed probability simplex."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(x) for x in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 1:
            raise InvalidDimension("empty probability vector")
        if any(x < 0.0 or x > 1.0 for x in probs):
            raise ValueError(f"coordinates must lie in [0, 1], got {probs}")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"coordinates must sum to 1, got sum {math.fsum(probs)!r}")

    @property
    def k(self) -> int:
        return len(self.probs)


@dataclass(frozen=True, eq=False)
class OutcomeTable:
    """All outcomes of the (n, k) multinomial sample space, in enumeration order.

    ``counts`` has shape (m, k); ``log_kappa[i]`` is the log multinomial
    coefficient of row i; ``m = C(n + k - 1, k - 1)``.
    """

    n: int
    k: int
    counts: np.ndarray = field(repr=False)
    log_kappa: np.ndarray = field(repr=False)
    _index: dict[tuple[int, ...], int] = field(repr=False)

    @property
    def m(self) -> int:
        return self.counts.shape[0]

    def index_of(self, r: CountVector | tuple[int, ...]) -> int:
        key = tuple(r.counts) if isinstance(r, CountVector) else tuple(int(c) for c in r)
        try:
            return self._index[key]
        except KeyError:
            raise ValueError(f"outcome {key} is not in the (n={self.n}, k={self.k}) table") from None


def _compositions(total: int, parts: int):
    """Yield all tuples of `parts` non-negative ints summing to `total`, lexicographically."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _outcome_budget(max_outcomes: int | None) -> int:
    if max_outcomes is not None:
        return int(max_outcomes)
    env = os.environ.get(_BUDGET_ENV_VAR)
    return int(env) if env else DEFAULT_MAX_OUTCOMES


def enumerate_outcomes(n: int, k: int, max_outcomes: int | None = None) -> OutcomeTable:
    """Build the full outcome table for an (n, k) multinomial.

    Raises InvalidDimension for k < 2 and BudgetExceeded when the table
    size C(n + k - 1, k - 1) exceeds the budget (default 5e6, overridable
    via the MVC_MAX_OUTCOMES environment variable).
    """
    if k < 2:
        raise InvalidDimension(f"need at least 2 categories, got k={k}")
    if n < 1:
        raise ValueError(f"sample size must be positive, got n={n}")
    budget = _outcome_budget(max_outcomes)
    m = math.comb(n + k - 1, k - 1)
    if m > budget:
        raise BudgetExceeded(f"outcome table would hold {m} rows, budget is {budget}")
    counts = np.array(list(_compositions(n, k)), dtype=np.int64)
    # log-factorial table shared by every row; raw factorials would overflow
    lf = np.array([math.lgamma(i + 1) for i in range(n + 1)])
    log_kappa_col = lf[n] - lf[counts].sum(axis=1)
    index = {tuple(int(c) for c in row): i for i, row in enumerate(counts)}
    return OutcomeTable(n=n, k=k, counts=counts, log_kappa=log_kappa_col, _index=index)


def log_kappa(r: CountVector | tuple[int, ...]) -> float:
    """Log multinomial coefficient log(n! / prod r_i!) via summed log-factorials."""
    counts = r.counts if isinstance(r, CountVector) else tuple(int(c) for c in r)
    n = sum(counts)
    return math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in counts)


def _as_counts(r) -> tuple[int, ...]:
    return r.counts if isinstance(r, CountVector) else tuple(int(c) for c in r)


def _as_probs(p) -> tuple[float, ...]:
    return p.probs if isinstance(p, SimplexPoint) else tuple(float(x) for x in p)


def log_prob(r: CountVector | tuple[int, ...], p: SimplexPoint | tuple[float, ...]) -> float:
    """log P_p(r), exactly -inf when some p_i = 0 with r_i > 0."""
    counts = _as_counts(r)
    probs = _as_probs(p)
    if len(counts) != len(probs):
        raise DimensionMismatch(f"outcome has {len(counts)} categories, point has {len(probs)}")
    total = log_kappa(counts)
    for c, x in zip(counts, probs):
        if c == 0:
            continue
        if x == 0.0:
            return float("-inf")
        total += c * math.log(x)
    return total


def grid_log_probs(table: OutcomeTable, points: np.ndarray) -> np.ndarray:
    """Log-probabilities of every table outcome at every grid point.

    ``points`` has shape (g, k) with rows on the simplex (zeros allowed);
    returns shape (g, m) with -inf where an outcome needs a zero category.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != table.k:
        raise DimensionMismatch(f"expected points of shape (g, {table.k}), got {points.shape}")
    positive = points > 0.0
    safe_log = np.where(positive, np.log(np.where(positive, points, 1.0)), 0.0)
    # accumulate category by category instead of one matmul: elementwise adds
    # round identically regardless of the number of grid rows, so a 1-point
    # call and a batched call agree bit for bit (ties must not flip between
    # the scalar and grid paths)
    counts = table.counts.astype(float)
    lp = np.broadcast_to(table.log_kappa, (points.shape[0], table.m)).copy()
    for c in range(table.k):
        lp += np.multiply.outer(safe_log[:, c], counts[:, c])
    impossible = (~positive).astype(float) @ (table.counts.T > 0)
    return np.where(impossible > 0, -np.inf, lp)


def grid_pvalues(table: OutcomeTable, r_hat: CountVector | tuple[int, ...], points: np.ndarray) -> np.ndarray:
    """Exact p-values of ``r_hat`` at each grid point, vectorized.

    The tail comparison and summation order match exact_p_value bit for bit:
    log-probabilities come from the same table rows and the tail sum runs in
    enumeration order.
    """
    idx = table.index_of(r_hat)
    lp = grid_log_probs(table, points)
    threshold = lp[:, idx][:, None]
    tail = lp <= threshold
    pv = np.where(tail, np.exp(lp), 0.0).sum(axis=1)
    return np.clip(pv, 0.0, 1.0)


def exact_p_value(
    r_hat: CountVector | tuple[int, ...],
    p: SimplexPoint | tuple[float, ...],
    table: OutcomeTable | None = None,
) -> float:
    """Exact multinomial p-value of ``r_hat`` at parameter ``p``.

    Sums P_p(q) over all outcomes q with P_p(q) <= P_p(r_hat), ties included.
    When P_p(r_hat) = 0 the result is exactly 0.0: every tail member is then
    itself an impossible outcome.
    """
    counts = _as_counts(r_hat)
    probs = _as_probs(p)
    if len(counts) != len(probs):
        raise DimensionMismatch(f"outcome has {len(counts)} categories, point has {len(probs)}")
    if table is None:
        table = enumerate_outcomes(sum(counts), len(counts))
    elif (table.n, table.k) != (sum(counts), len(counts)):
        raise DimensionMismatch(
            f"table is for (n={table.n}, k={table.k}), outcome is (n={sum(counts)}, k={len(counts)})"
        )
    point = np.asarray(probs, dtype=float)[None, :]
    return float(grid_pvalues(table, counts, point)[0])


def simplex_vertex_grid(k: int, resolution: int, max_points: int | None = None) -> np.ndarray:
    """Uniform barycentric grid {c / R : c a composition of R}, faces included."""
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution}")
    budget = _outcome_budget(max_points)
    g = math.comb(resolution + k - 1, k - 1)
    if g > budget:
        raise BudgetExceeded(f"grid would hold {g} points, budget is {budget}")
    rows = np.array(list(_compositions(resolution, k)), dtype=np.int64)
    return rows.astype(float) / resolution


def simplex_centroid_grid(k: int, resolution: int, max_points: int | None = None) -> np.ndarray:
    """Cell-centred barycentric grid {(c + 1/k) / R}, strictly interior.

    Resolution 1 yields the single centroid of the simplex.
    """
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution}")
    budget = _outcome_budget(max_points)
    g = math.comb(resolution - 1 + k - 1, k - 1)
    if g > budget:
        raise BudgetExceeded(f"grid would hold {g} points, budget is {budget}")
    rows = np.array(list(_compositions(resolution - 1, k)), dtype=np.int64)
    return (rows.astype(float) + 1.0 / k) / resolution


_ORACLE_CHUNK = 20_000


def oracle_max_min_pvalue(
    r_a: CountVector | tuple[int, ...],
    r_b: CountVector | tuple[int, ...],
    resolution: int,
    table: OutcomeTable | None = None,
    max_points: int | None = None,
) -> float:
    """Brute-force reference: max over a dense barycentric grid of min(rho_A, rho_B).

    The grid includes all boundary faces, so witnesses with zero coordinates
    are covered. Deterministic for fixed inputs.
    """
    a, b = _as_counts(r_a), _as_counts(r_b)
    if len(a) != len(b) or sum(a) != sum(b):
        raise DimensionMismatch(f"outcomes {a} and {b} do not share (n, k)")
    if table is None:
        table = enumerate_outcomes(sum(a), len(a))
    ia, ib = table.index_of(a), table.index_of(b)
    grid = simplex_vertex_grid(len(a), resolution, max_points=max_points)
    best = 0.0
    for lo in range(0, grid.shape[0], _ORACLE_CHUNK):
        chunk = grid[lo:lo + _ORACLE_CHUNK]
        lp = grid_log_probs(table, chunk)
        probs = np.exp(lp)
        pa = np.where(lp <= lp[:, ia][:, None], probs, 0.0).sum(axis=1)
        pb = np.where(lp <= lp[:, ib][:, None], probs, 0.0).sum(axis=1)
        best = max(best, float(np.minimum(pa, pb).max()))
    return min(best, 1.0)
