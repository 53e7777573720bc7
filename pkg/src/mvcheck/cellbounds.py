"""Certified p-value intervals on simplex cells.

Because log P_{p(u)}(r) is concave in u, its minimum over a cell is attained
at a vertex, so the vertex minimum

    Pmin(r) = min_j P_{p(w_j)}(r)

is a valid lower bound for the probability of r anywhere in the cell. With
the tail classification of a cell this yields a certified interval for the
exact p-value of the observed outcome, valid at every point of the cell:

    lower = sum of Pmin over definitely-in-tail outcomes (observed included)
    upper = 1 - sum of Pmin over definitely-out-of-tail outcomes

Ambiguous outcomes contribute to neither sum; both sums run in enumeration
order and the results are clamped to [0, 1] after summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .logodds import DEFAULT_SLACK, SimplexCell, tail_masks
from .multinomial import CountVector, OutcomeTable, _as_counts


@dataclass(frozen=True)
class PValueInterval:
    """A certified enclosure 0 <= lower <= upper <= 1 for an exact p-value."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(f"not a p-value interval: [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class CellBounds:
    """Per-outcome intervals on one cell plus the bounds on their minimum."""

    interval_a: PValueInterval
    interval_b: PValueInterval

    @property
    def min_lower(self) -> float:
        return min(self.interval_a.lower, self.interval_b.lower)

    @property
    def min_upper(self) -> float:
        return min(self.interval_a.upper, self.interval_b.upper)


class VertexProbCache:
    """Per-vertex outcome probabilities, keyed by exact coordinate bit patterns.

    Each entry stores the affine part h(w) = C u + log kappa (used for tail
    functionals, whose values are differences of h entries) and the full
    probability vector exp(h - n * logsumexp). Shared vertices produced by
    bisection are bit-identical tuples, so repeated lookups hit.
    """

    def __init__(self, table: OutcomeTable) -> None:
        self.table = table
        self._entries: dict[tuple[float, ...], tuple[np.ndarray, np.ndarray]] = {}
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, vertex: tuple[float, ...]) -> tuple[np.ndarray, np.ndarray]:
        entry = self._entries.get(vertex)
        if entry is not None:
            self.hits += 1
            return entry
        self.misses += 1
        w = np.asarray(vertex, dtype=float)
        h = self.table.counts[:, :-1].astype(float) @ w + self.table.log_kappa
        top = max(0.0, float(w.max()) if w.size else 0.0)
        lse = top + math.log(math.exp(-top) + float(np.exp(w - top).sum()))
        probs = np.exp(h - self.table.n * lse)
        entry = (h, probs)
        self._entries[vertex] = entry
        return entry


def _cell_entries(cell: SimplexCell, cache: VertexProbCache) -> tuple[np.ndarray, np.ndarray]:
    pairs = [cache.get(v) for v in cell.vertices]
    h_stack = np.stack([h for h, _ in pairs])
    prob_stack = np.stack([p for _, p in pairs])
    return h_stack, prob_stack


def vertex_min_prob(
    cell: SimplexCell,
    r: CountVector | tuple[int, ...],
    table: OutcomeTable,
    cache: VertexProbCache | None = None,
) -> float:
    """Certified lower bound for P_p(r) over the cell: the vertex minimum."""
    if cache is None:
        cache = VertexProbCache(table)
    elif cache.table is not table:
        raise DimensionMismatch("cache was built for a different outcome table")
    idx = table.index_of(_as_counts(r))
    _, prob_stack = _cell_entries(cell, cache)
    return float(prob_stack[:, idx].min())


def _interval_from_masks(prob_min: np.ndarray, in_mask: np.ndarray, out_mask: np.ndarray) -> PValueInterval:
    lower = float(prob_min[in_mask].sum())
    upper = 1.0 - float(prob_min[out_mask].sum())
    lower = min(max(lower, 0.0), 1.0)
    upper = min(max(upper, 0.0), 1.0)
    return PValueInterval(lower=min(lower, upper), upper=upper)


def pvalue_interval(
    cell: SimplexCell,
    r_hat: CountVector | tuple[int, ...],
    table: OutcomeTable,
    cache: VertexProbCache | None = None,
    slack: float = DEFAULT_SLACK,
) -> PValueInterval:
    """Certified enclosure of the exact p-value of ``r_hat`` on the whole cell.

    The observed outcome is always counted in the tail regardless of the
    classification slack; its tail functional is identically zero, so this
    is exact rather than a heuristic.
    """
    if cache is None:
        cache = VertexProbCache(table)
    idx = table.index_of(_as_counts(r_hat))
    h_stack, prob_stack = _cell_entries(cell, cache)
    g = h_stack - h_stack[:, idx][:, None]
    in_mask, out_mask, _ = tail_masks(g, slack)
    in_mask = in_mask.copy()
    in_mask[idx] = True
    return _interval_from_masks(prob_stack.min(axis=0), in_mask, out_mask)


def cell_bounds(
    cell: SimplexCell,
    r_a: CountVector | tuple[int, ...],
    r_b: CountVector | tuple[int, ...],
    table: OutcomeTable,
    cache: VertexProbCache | None = None,
    slack: float = DEFAULT_SLACK,
) -> CellBounds:
    """Intervals for both observed outcomes on one cell, sharing vertex work."""
    if cache is None:
        cache = VertexProbCache(table)
    ia = table.index_of(_as_counts(r_a))
    ib = table.index_of(_as_counts(r_b))
    h_stack, prob_stack = _cell_entries(cell, cache)
    prob_min = prob_stack.min(axis=0)
    intervals = []
    for idx in (ia, ib):
        g = h_stack - h_stack[:, idx][:, None]
        in_mask, out_mask, _ = tail_masks(g, slack)
        in_mask = in_mask.copy()
        in_mask[idx] = True
        intervals.append(_interval_from_masks(prob_min, in_mask, out_mask))
    return CellBounds(interval_a=intervals[0], interval_b=intervals[1])
