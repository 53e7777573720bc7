"""Ternary rendering of membership grids for three-category problems."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SQRT3_2 = math.sqrt(3.0) / 2.0


def ternary_xy(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Project barycentric (p1, p2, p3) onto the plane.

    Corner convention: p1 at the origin, p2 at (1, 0), p3 at the apex.
    """
    points = np.asarray(points, dtype=float)
    x = points[:, 1] + 0.5 * points[:, 2]
    y = _SQRT3_2 * points[:, 2]
    return x, y


def render_membership(
    points: np.ndarray,
    in_a: np.ndarray,
    in_b: np.ndarray,
    label_a: str,
    label_b: str,
    title: str,
    path: str,
) -> None:
    """Write a ternary figure with the two membership regions in distinct fills."""
    x, y = ternary_xy(points)
    fig, ax = plt.subplots(figsize=(6.0, 5.5))

    only_a = in_a & ~in_b
    only_b = in_b & ~in_a
    both = in_a & in_b
    ax.scatter(x[only_a], y[only_a], s=4, marker="o", linewidths=0,
               color="#4878cf", alpha=0.75, label=label_a)
    ax.scatter(x[only_b], y[only_b], s=4, marker="o", linewidths=0,
               color="#d1885c", alpha=0.75, label=label_b)
    if both.any():
        ax.scatter(x[both], y[both], s=5, marker="o", linewidths=0,
                   color="#46275c", label="both")

    corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, _SQRT3_2], [0.0, 0.0]])
    ax.plot(corners[:, 0], corners[:, 1], color="black", linewidth=1.0)
    ax.text(-0.03, -0.04, "$p_1$", ha="center")
    ax.text(1.03, -0.04, "$p_2$", ha="center")
    ax.text(0.5, _SQRT3_2 + 0.03, "$p_3$", ha="center")

    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8, markerscale=2.5)
    ax.set_aspect("equal")
    ax.set_xlim(-0.08, 1.12)
    ax.set_ylim(-0.08, _SQRT3_2 + 0.1)
    ax.axis("off")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
