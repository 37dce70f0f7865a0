"""Dimension-generic point geometry shared by the protocol, engine and metrics.

Agent positions are plain float64 arrays of shape (N, M) with M in {1, 2, 3}.
All distance computations are brute-force O(N^2); at the group sizes this
library targets that is faster (and far simpler) than spatial indexing.
"""

from __future__ import annotations

import numpy as np

# Two positions closer than this are treated as coincident (length units).
POSITION_TOL = 1e-12


def as_points(positions) -> np.ndarray:
    """Coerce a point collection to a validated (N, M) float64 array.

    Accepts a 1-D sequence (interpreted as N points on a line) or any
    (N, M) array-like with M in {1, 2, 3}. Raises ValueError for ragged
    input, empty input, unsupported dimension or non-finite coordinates.
    """
    try:
        pts = np.asarray(positions, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"points have mismatched dimensions: {exc}") from None
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2:
        raise ValueError(f"expected an (N, M) point array, got shape {pts.shape}")
    if pts.shape[0] < 1:
        raise ValueError("need at least one point")
    if pts.shape[1] not in (1, 2, 3):
        raise ValueError(f"space dimension must be 1, 2 or 3, got {pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    return pts


def pairwise_distances(positions) -> np.ndarray:
    """Full N x N Euclidean distance matrix (symmetric, zero diagonal)."""
    pts = as_points(positions)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def group_diameter(positions) -> float:
    """Largest inter-agent distance; 0 for a single agent."""
    pts = as_points(positions)
    if pts.shape[0] == 1:
        return 0.0
    return float(pairwise_distances(pts).max())


def centroid(positions) -> np.ndarray:
    """Coordinate-wise mean of the group, shape (M,)."""
    return as_points(positions).mean(axis=0)
