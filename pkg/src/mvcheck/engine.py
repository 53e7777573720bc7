"""Certified intersection decisions via adaptive simplex refinement.

The interior engine triangulates the search box into Kuhn simplices and
refines a priority queue of cells. Each popped cell gets certified p-value
intervals for both observed outcomes; writing L and U for the lower and
upper bounds on min(rho_A, rho_B) over the cell:

    L >= alpha + tau   -> INTERSECT, any point of the cell is a witness
    U <  alpha - tau   -> the cell cannot contain a robust witness; prune
    diameter <= eps    -> leave unresolved
    otherwise          -> bisect the longest edge and requeue the children

An empty queue with no unresolved cells certifies disjointness. Outcomes
with zero counts are handled by decomposing the simplex boundary into faces:
a parameter with p_i = 0 where an observed count is positive has p-value
exactly zero, so only faces dropping a subset of the jointly-zero categories
can carry witnesses.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cellbounds import VertexProbCache, cell_bounds
from .errors import DimensionMismatch, EmptyDomain, InvalidTolerance
from .logodds import DEFAULT_SLACK, SimplexCell, from_logodds
from .multinomial import CountVector, SimplexPoint, _as_counts, enumerate_outcomes
from .searchbox import SearchDomain, build_domain


class Verdict(str, Enum):
    INTERSECT = "INTERSECT"
    DISJOINT = "DISJOINT"
    UNCERTAIN = "UNCERTAIN"


@dataclass(frozen=True)
class DecisionConfig:
    """Tolerances and budgets for one decision run.

    tau is the robustness margin: INTERSECT certifies a witness with both
    p-values >= alpha + tau, DISJOINT certifies no parameter reaches
    alpha - tau. epsilon is the refinement floor on cell diameters.
    """

    alpha: float
    tau: float = 1e-3
    epsilon: float = 1e-3
    max_cells: int = 500_000
    slack: float = DEFAULT_SLACK

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise InvalidTolerance(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.tau < min(self.alpha, 1.0 - self.alpha):
            raise InvalidTolerance(f"tau must lie in (0, min(alpha, 1 - alpha)), got {self.tau}")
        if self.epsilon <= 0.0:
            raise InvalidTolerance(f"epsilon must be positive, got {self.epsilon}")
        if self.max_cells < 2:
            raise ValueError(f"max_cells must be at least 2, got {self.max_cells}")
        if self.slack < 0.0:
            raise ValueError(f"slack must be non-negative, got {self.slack}")


@dataclass(frozen=True)
class FaceSummary:
    """Outcome of one face subproblem."""

    dropped: tuple[int, ...]
    verdict: Verdict
    cells_processed: int
    unresolved_count: int
    budget_exhausted: bool


@dataclass(frozen=True)
class Decision:
    """Result of a decision run, with enough statistics to reproduce reports."""

    verdict: Verdict
    witness: SimplexPoint | None = None
    face: tuple[int, ...] | None = None
    unresolved_count: int = 0
    cells_processed: int = 0
    cells_pruned: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    budget_exhausted: bool = False
    face_results: tuple[FaceSummary, ...] | None = None
    trace: tuple[dict, ...] | None = None


@dataclass(frozen=True)
class FaceProblem:
    """One boundary face: categories to drop and the reduced outcomes."""

    dropped: tuple[int, ...]
    r_a: tuple[int, ...]
    r_b: tuple[int, ...]


@dataclass(frozen=True)
class FacePlan:
    """Joint support split and the face subproblems, shallowest first."""

    support: tuple[int, ...]
    jointly_zero: tuple[int, ...]
    faces: tuple[FaceProblem, ...]


def plan_faces(r_a: CountVector | tuple[int, ...], r_b: CountVector | tuple[int, ...]) -> FacePlan:
    """Enumerate the 2^|Z| face subproblems over the jointly-zero categories Z.

    Faces are ordered by increasing number of dropped categories, ties
    lexicographic, so the full-dimensional problem runs first.
    """
    a, b = _as_counts(r_a), _as_counts(r_b)
    if len(a) != len(b) or sum(a) != sum(b):
        raise DimensionMismatch(f"outcomes {a} and {b} do not share (n, k)")
    support = tuple(i for i in range(len(a)) if a[i] > 0 or b[i] > 0)
    zero = tuple(i for i in range(len(a)) if a[i] == 0 and b[i] == 0)
    faces = []
    for size in range(len(zero) + 1):
        for dropped in itertools.combinations(zero, size):
            keep = [i for i in range(len(a)) if i not in dropped]
            faces.append(FaceProblem(
                dropped=dropped,
                r_a=tuple(a[i] for i in keep),
                r_b=tuple(b[i] for i in keep),
            ))
    return FacePlan(support=support, jointly_zero=zero, faces=tuple(faces))


def _supported_reference_order(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Category order placing a jointly supported category last.

    The log-odds chart and the domain strip walls need a reference category
    that at least one outcome observes; p-values are permutation equivariant,
    so relabeling is exact.
    """
    k = len(a)
    if a[-1] > 0 or b[-1] > 0:
        return tuple(range(k))
    pivot = max(i for i in range(k) if a[i] > 0 or b[i] > 0)
    order = list(range(k))
    order[pivot], order[k - 1] = order[k - 1], order[pivot]
    return tuple(order)


def kuhn_cells(domain: SearchDomain) -> list[SimplexCell]:
    """Triangulate the box into d! Kuhn simplices along coordinate chains."""
    lo = np.asarray(domain.lows, dtype=float)
    cells = []
    for perm in itertools.permutations(range(domain.dim)):
        vertices = [tuple(lo)]
        current = lo.copy()
        for axis in perm:
            current = current.copy()
            current[axis] = domain.highs[axis]
            vertices.append(tuple(current))
        cells.append(SimplexCell(tuple(vertices)))
    return cells


def _centroid(cell: SimplexCell) -> tuple[float, ...]:
    verts = np.asarray(cell.vertices, dtype=float)
    return tuple(float(x) for x in verts.mean(axis=0))


def decide_interior(
    r_a,
    r_b,
    config: DecisionConfig,
    collect_trace: bool = False,
) -> Decision:
    """Decide robust intersection of the two confidence sets on one chart.

    Handles any pair of same-(n, k) outcomes whose joint support covers all
    categories of the current problem except possibly some jointly-zero ones
    (those axes get strip walls; their faces are decided separately by
    decide_with_faces). A single-category problem is trivially INTERSECT:
    the only parameter is the vertex, where both p-values equal 1.
    """
    a, b = _as_counts(r_a), _as_counts(r_b)
    if len(a) != len(b) or sum(a) != sum(b):
        raise DimensionMismatch(f"outcomes {a} and {b} do not share (n, k)")
    if len(a) == 1:
        return Decision(verdict=Verdict.INTERSECT, witness=SimplexPoint((1.0,)))

    order = _supported_reference_order(a, b)
    pa = tuple(a[i] for i in order)
    pb = tuple(b[i] for i in order)

    table = enumerate_outcomes(sum(pa), len(pa))
    try:
        domain = build_domain(pa, pb, config.alpha, config.tau, table)
    except EmptyDomain:
        return Decision(verdict=Verdict.DISJOINT)

    cache = VertexProbCache(table)
    heap: list[tuple[float, int, SimplexCell, int | None]] = []
    counter = itertools.count()
    trace: list[dict] = []

    def push(cell: SimplexCell, priority: float, parent: int | None) -> None:
        heapq.heappush(heap, (-priority, next(counter), cell, parent))

    for root in kuhn_cells(domain):
        push(root, 1.0, None)

    processed = pruned = unresolved = 0
    certify_at = config.alpha + config.tau
    prune_at = config.alpha - config.tau

    while heap and processed < config.max_cells:
        _, cell_id, cell, parent = heapq.heappop(heap)
        bounds = cell_bounds(cell, pa, pb, table, cache, slack=config.slack)
        processed += 1
        lower, upper = bounds.min_lower, bounds.min_upper

        if lower >= certify_at:
            action = "certify"
        elif upper < prune_at:
            action = "prune"
            pruned += 1
        elif cell.diameter <= config.epsilon:
            action = "floor"
            unresolved += 1
        else:
            action = "bisect"

        if collect_trace:
            trace.append({
                "id": cell_id,
                "parent": parent,
                "generation": cell.generation,
                "diameter": cell.diameter,
                "min_lower": lower,
                "min_upper": upper,
                "action": action,
            })

        if action == "certify":
            witness_here = from_logodds(_centroid(cell)).probs
            restored = [0.0] * len(a)
            for pos, original in enumerate(order):
                restored[original] = witness_here[pos]
            return Decision(
                verdict=Verdict.INTERSECT,
                witness=SimplexPoint(tuple(restored)),
                unresolved_count=unresolved,
                cells_processed=processed,
                cells_pruned=pruned,
                cache_hits=cache.hits,
                cache_misses=cache.misses,
                trace=tuple(trace) if collect_trace else None,
            )
        if action == "bisect":
            for child in cell.bisect():
                push(child, upper, cell_id)

    exhausted = bool(heap)
    if exhausted:
        unresolved += len(heap)
        verdict = Verdict.UNCERTAIN
    else:
        verdict = Verdict.UNCERTAIN if unresolved else Verdict.DISJOINT
    return Decision(
        verdict=verdict,
        unresolved_count=unresolved,
        cells_processed=processed,
        cells_pruned=pruned,
        cache_hits=cache.hits,
        cache_misses=cache.misses,
        budget_exhausted=exhausted,
        trace=tuple(trace) if collect_trace else None,
    )


def _lift_witness(witness: SimplexPoint, dropped: tuple[int, ...], k: int) -> SimplexPoint:
    """Insert exact zeros for dropped categories; the collapse is exact."""
    probs = [0.0] * k
    keep = [i for i in range(k) if i not in dropped]
    for pos, original in enumerate(keep):
        probs[original] = witness.probs[pos]
    return SimplexPoint(tuple(probs))


def decide_with_faces(
    r_a,
    r_b,
    config: DecisionConfig,
    collect_trace: bool = False,
) -> Decision:
    """Full decision over the closed simplex via face decomposition.

    Runs the interior engine on every subset of the jointly-zero categories,
    shallowest faces first, short-circuiting on the first INTERSECT (the
    witness is lifted with exact zeros). DISJOINT requires every face to be
    disjoint with no unresolved cells; anything else aggregates to UNCERTAIN.
    """
    a = CountVector(_as_counts(r_a))
    b = CountVector(_as_counts(r_b))
    if (a.n, a.k) != (b.n, b.k):
        raise DimensionMismatch(f"outcomes {a.counts} and {b.counts} do not share (n, k)")
    plan = plan_faces(a, b)

    summaries: list[FaceSummary] = []
    trace: list[dict] = []
    totals = {"processed": 0, "pruned": 0, "hits": 0, "misses": 0, "unresolved": 0}
    exhausted = False

    for face in plan.faces:
        sub = decide_interior(face.r_a, face.r_b, config, collect_trace=collect_trace)
        totals["processed"] += sub.cells_processed
        totals["pruned"] += sub.cells_pruned
        totals["hits"] += sub.cache_hits
        totals["misses"] += sub.cache_misses
        totals["unresolved"] += sub.unresolved_count
        exhausted = exhausted or sub.budget_exhausted
        summaries.append(FaceSummary(
            dropped=face.dropped,
            verdict=sub.verdict,
            cells_processed=sub.cells_processed,
            unresolved_count=sub.unresolved_count,
            budget_exhausted=sub.budget_exhausted,
        ))
        if collect_trace and sub.trace:
            trace.extend({**record, "face": list(face.dropped)} for record in sub.trace)
        if sub.verdict is Verdict.INTERSECT:
            return Decision(
                verdict=Verdict.INTERSECT,
                witness=_lift_witness(sub.witness, face.dropped, a.k),
                face=face.dropped,
                unresolved_count=totals["unresolved"],
                cells_processed=totals["processed"],
                cells_pruned=totals["pruned"],
                cache_hits=totals["hits"],
                cache_misses=totals["misses"],
                budget_exhausted=exhausted,
                face_results=tuple(summaries),
                trace=tuple(trace) if collect_trace else None,
            )

    all_disjoint = all(s.verdict is Verdict.DISJOINT for s in summaries)
    verdict = Verdict.DISJOINT if all_disjoint else Verdict.UNCERTAIN
    return Decision(
        verdict=verdict,
        unresolved_count=totals["unresolved"],
        cells_processed=totals["processed"],
        cells_pruned=totals["pruned"],
        cache_hits=totals["hits"],
        cache_misses=totals["misses"],
        budget_exhausted=exhausted,
        face_results=tuple(summaries),
        trace=tuple(trace) if collect_trace else None,
    )
