"""Exception types raised across the package."""

from __future__ import annotations


class MvcheckError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimension(MvcheckError):
    """Count vector or simplex point has fewer than the required categories."""


class DimensionMismatch(MvcheckError):
    """Two objects that must share (n, k) do not."""


class BudgetExceeded(MvcheckError):
    """An enumeration or grid would exceed the configured size budget."""


class BoundaryPoint(MvcheckError):
    """Log-odds coordinates requested for a point with a zero coordinate."""


class DegenerateCell(MvcheckError):
    """Simplex cell vertices are affinely dependent."""


class DegenerateSlice(MvcheckError):
    """Slice maximizer undefined: the axis count is 0 or the full sample size."""


class InvalidTolerance(MvcheckError):
    """Tolerance parameters violate 0 < tau < min(alpha, 1 - alpha)."""


class EmptyDomain(MvcheckError):
    """The two outcome bounding boxes do not intersect.

    Raised by the search-domain builder; a valid early disjointness
    certificate, because every candidate parameter fails the universal
    p-value bound for at least one of the outcomes.
    """
