"""Log-odds coordinates, simplex cells, and tail halfspaces.

With the last category as reference, a strictly positive simplex point maps
to u_i = log(p_i / p_k) for i = 1..k-1. In these coordinates

    log P_{p(u)}(r) = log kappa(r) + sum_i r_i u_i - n log(1 + sum_j e^{u_j})

is concave (affine minus n times log-sum-exp), and the tail comparison
P_{p(u)}(r) <= P_{p(u)}(r_hat) is equivalent to g(u) <= 0 for the affine
functional

    g(u) = sum_i (r_i - r_hat_i) u_i - (log kappa(r_hat) - log kappa(r)),

because the log-sum-exp term cancels in the difference.
"""

from __future__ import annotations

import functools
import math
from dataclasses import InitVar, dataclass

import numpy as np

from .errors import BoundaryPoint, DegenerateCell, DimensionMismatch
from .multinomial import CountVector, OutcomeTable, SimplexPoint, _as_counts, log_kappa

# Classification slack absorbing float rounding in the affine functionals.
DEFAULT_SLACK = 1e-12

LogOdds = tuple[float, ...]


def to_logodds(p: SimplexPoint | tuple[float, ...]) -> LogOdds:
    """Map a strictly positive simplex point to log-odds coordinates."""
    probs = p.probs if isinstance(p, SimplexPoint) else tuple(float(x) for x in p)
    if any(x == 0.0 for x in probs):
        raise BoundaryPoint(f"log-odds undefined on the boundary: {probs}")
    ref = probs[-1]
    return tuple(math.log(x / ref) for x in probs[:-1])


def from_logodds(u: LogOdds | np.ndarray) -> SimplexPoint:
    """Inverse softmax map; stable under large coordinates via max subtraction."""
    z = [float(x) for x in u] + [0.0]
    top = max(z)
    exps = [math.exp(x - top) for x in z]
    total = math.fsum(exps)
    return SimplexPoint(tuple(e / total for e in exps))


@dataclass(frozen=True)
class HalfspaceFunctional:
    """Affine tail functional g for one outcome against the observed one.

    g(u) <= 0 exactly when the outcome is no more probable than the observed
    outcome at p(u).
    """

    normal: tuple[float, ...]
    offset: float

    def value(self, u: LogOdds | np.ndarray) -> float:
        acc = -self.offset
        for n_i, u_i in zip(self.normal, u):
            acc += n_i * float(u_i)
        return acc


def halfspace_for(r: CountVector | tuple[int, ...], r_hat: CountVector | tuple[int, ...]) -> HalfspaceFunctional:
    """Build g for outcome ``r`` relative to observed ``r_hat`` (same n and k)."""
    rc, hc = _as_counts(r), _as_counts(r_hat)
    if len(rc) != len(hc) or sum(rc) != sum(hc):
        raise DimensionMismatch(f"outcomes {rc} and {hc} do not share (n, k)")
    normal = tuple(float(a - b) for a, b in zip(rc[:-1], hc[:-1]))
    return HalfspaceFunctional(normal=normal, offset=log_kappa(hc) - log_kappa(rc))


@dataclass(frozen=True)
class SimplexCell:
    """A d-simplex in log-odds space: d+1 vertices of dimension d.

    Vertices are stored as exact float tuples so that shared vertices of
    neighbouring cells are bit-identical cache keys.
    """

    vertices: tuple[tuple[float, ...], ...]
    generation: int = 0
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        vertices = tuple(tuple(float(x) for x in v) for v in self.vertices)
        object.__setattr__(self, "vertices", vertices)
        dim = len(vertices[0])
        if len(vertices) != dim + 1:
            raise DegenerateCell(f"a {dim}-simplex needs {dim + 1} vertices, got {len(vertices)}")
        if any(len(v) != dim for v in vertices):
            raise DegenerateCell("vertices have mixed dimensions")
        if validate and not self._affinely_independent():
            raise DegenerateCell(f"vertices are affinely dependent: {vertices}")

    def _affinely_independent(self, tol: float = 1e-10) -> bool:
        base = np.asarray(self.vertices[0], dtype=float)
        edges = np.asarray(self.vertices[1:], dtype=float) - base
        if edges.shape[0] == 0:
            return True
        singular = np.linalg.svd(edges, compute_uv=False)
        return bool(singular.min() > tol)

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @functools.cached_property
    def diameter(self) -> float:
        verts = np.asarray(self.vertices, dtype=float)
        best = 0.0
        for i in range(len(verts) - 1):
            d = np.linalg.norm(verts[i + 1:] - verts[i], axis=1).max()
            best = max(best, float(d))
        return best

    def longest_edge(self) -> tuple[int, int]:
        """Index pair of the longest edge; ties go to the lowest (i, j) pair."""
        verts = np.asarray(self.vertices, dtype=float)
        best_pair, best_len = (0, 1), -1.0
        for i in range(len(verts) - 1):
            for j in range(i + 1, len(verts)):
                length = float(np.linalg.norm(verts[j] - verts[i]))
                if length > best_len:
                    best_pair, best_len = (i, j), length
        return best_pair

    def bisect(self) -> tuple["SimplexCell", "SimplexCell"]:
        """Split at the exact float average of the longest edge's endpoints.

        The midpoint is the same float tuple in both children, so sibling
        cells share bit-identical vertices.
        """
        i, j = self.longest_edge()
        a, b = self.vertices[i], self.vertices[j]
        mid = tuple((x + y) / 2.0 for x, y in zip(a, b))
        first = list(self.vertices)
        second = list(self.vertices)
        first[j] = mid
        second[i] = mid
        gen = self.generation + 1
        return (
            SimplexCell(tuple(first), generation=gen),
            SimplexCell(tuple(second), generation=gen),
        )


def vertex_tail_values(table: OutcomeTable, r_hat_index: int, vertex_matrix: np.ndarray) -> np.ndarray:
    """g-values of every outcome at every vertex, shape (n_vertices, m).

    Row j holds g(w_j) for all outcomes; the observed outcome's column is
    identically zero.
    """
    h = vertex_matrix @ table.counts[:, :-1].T.astype(float) + table.log_kappa[None, :]
    return h - h[:, r_hat_index][:, None]


def tail_masks(g_values: np.ndarray, slack: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Partition outcomes by the sign of g across all vertices of a cell."""
    in_tail = (g_values <= -slack).all(axis=0)
    out_of_tail = (g_values > slack).all(axis=0)
    ambiguous = ~(in_tail | out_of_tail)
    return in_tail, out_of_tail, ambiguous


def classify_cell(
    cell: SimplexCell,
    r_hat: CountVector | tuple[int, ...],
    table: OutcomeTable,
    slack: float = DEFAULT_SLACK,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split the outcome table into definitely-in-tail, definitely-out, ambiguous.

    An outcome is in the tail on the whole cell when g <= -slack at every
    vertex (g is affine, so vertex signs decide the hull), out of the tail
    when g > slack at every vertex, and ambiguous otherwise. The three index
    arrays partition range(m). With slack > 0 the observed outcome itself
    (g identically 0) lands in ambiguous; certified bounds re-add it to the
    tail side explicitly, which is exact.
    """
    idx = table.index_of(r_hat)
    verts = np.asarray(cell.vertices, dtype=float)
    g = vertex_tail_values(table, idx, verts)
    in_mask, out_mask, amb_mask = tail_masks(g, slack)
    return np.flatnonzero(in_mask), np.flatnonzero(out_mask), np.flatnonzero(amb_mask)
