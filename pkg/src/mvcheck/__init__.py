"""Certified intersection decisions for exact multinomial confidence regions.

Given two observed count vectors with the same sample size, the engine
decides whether their exact-p-value confidence regions share a parameter
(INTERSECT), are provably separated (DISJOINT), or cannot be resolved
within the configured robustness margin (UNCERTAIN). Every INTERSECT comes
with an explicit witness parameter and every DISJOINT is backed by interval
arithmetic that covers the whole search region.
"""

from .cellbounds import (
    CellBounds,
    PValueInterval,
    VertexProbCache,
    cell_bounds,
    pvalue_interval,
    vertex_min_prob,
)
from .engine import (
    Decision,
    DecisionConfig,
    FacePlan,
    FaceProblem,
    FaceSummary,
    Verdict,
    decide_interior,
    decide_with_faces,
    kuhn_cells,
    plan_faces,
)
from .errors import (
    BoundaryPoint,
    BudgetExceeded,
    DegenerateCell,
    DegenerateSlice,
    DimensionMismatch,
    EmptyDomain,
    InvalidDimension,
    InvalidTolerance,
    MvcheckError,
)
from .logodds import (
    HalfspaceFunctional,
    SimplexCell,
    classify_cell,
    from_logodds,
    halfspace_for,
    to_logodds,
)
from .multinomial import (
    CountVector,
    OutcomeTable,
    SimplexPoint,
    enumerate_outcomes,
    exact_p_value,
    grid_log_probs,
    grid_pvalues,
    log_kappa,
    log_prob,
    oracle_max_min_pvalue,
    simplex_centroid_grid,
    simplex_vertex_grid,
)
from .searchbox import (
    SearchDomain,
    build_domain,
    slice_maximizer,
    slice_value,
    superlevel_slice,
    superlevel_threshold,
)
from .wilks import WilksRegion, chisq_cdf, chisq_quantile, deviance, wilks_intersect, wilks_member

__version__ = "0.1.0"

__all__ = [
    "BoundaryPoint",
    "BudgetExceeded",
    "CellBounds",
    "CountVector",
    "Decision",
    "DecisionConfig",
    "DegenerateCell",
    "DegenerateSlice",
    "DimensionMismatch",
    "EmptyDomain",
    "FacePlan",
    "FaceProblem",
    "FaceSummary",
    "HalfspaceFunctional",
    "InvalidDimension",
    "InvalidTolerance",
    "MvcheckError",
    "OutcomeTable",
    "PValueInterval",
    "SearchDomain",
    "SimplexCell",
    "SimplexPoint",
    "Verdict",
    "VertexProbCache",
    "WilksRegion",
    "build_domain",
    "cell_bounds",
    "chisq_cdf",
    "chisq_quantile",
    "classify_cell",
    "decide_interior",
    "decide_with_faces",
    "deviance",
    "enumerate_outcomes",
    "exact_p_value",
    "from_logodds",
    "grid_log_probs",
    "grid_pvalues",
    "halfspace_for",
    "kuhn_cells",
    "log_kappa",
    "log_prob",
    "oracle_max_min_pvalue",
    "plan_faces",
    "pvalue_interval",
    "simplex_centroid_grid",
    "simplex_vertex_grid",
    "slice_maximizer",
    "slice_value",
    "superlevel_slice",
    "superlevel_threshold",
    "to_logodds",
    "vertex_min_prob",
    "wilks_intersect",
    "wilks_member",
]
