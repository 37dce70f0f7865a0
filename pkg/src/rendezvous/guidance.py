"""Single-integrator guidance: the velocity an agent would follow.

The guidance velocity is a weighted sum of offsets toward the selected
neighbors. Weights are either one uniform positive constant or a
per-rank list applied in buffer order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GuidanceParams:
    """Attraction weights: a scalar, or one weight per buffer rank."""

    weights: float | tuple[float, ...] = 1.0

    def __post_init__(self):
        if isinstance(self.weights, (int, float)):
            object.__setattr__(self, "weights", float(self.weights))
            if self.weights <= 0:
                raise ValueError(f"guidance weight must be positive, got {self.weights}")
        else:
            w = tuple(float(x) for x in self.weights)
            object.__setattr__(self, "weights", w)
            if not w or any(x <= 0 for x in w):
                raise ValueError("per-rank guidance weights must be a nonempty positive list")

    def rank_weights(self, k: int) -> np.ndarray:
        """Weights for a view of length k (scalar broadcast or list head)."""
        if isinstance(self.weights, float):
            return np.full(k, self.weights)
        if k > len(self.weights):
            raise ValueError(f"view length {k} exceeds the {len(self.weights)} configured rank weights")
        return np.asarray(self.weights[:k])


def guidance_velocity(position, seen_positions, params: GuidanceParams) -> np.ndarray:
    """Guidance velocity for one agent given its neighbor view.

    ``seen_positions`` are the neighbor positions in buffer order, as the
    agent received them (possibly delayed). An empty view yields the zero
    vector: no information, no motion.
    """
    position = np.asarray(position, dtype=np.float64)
    seen = np.asarray(seen_positions, dtype=np.float64).reshape(-1, position.shape[-1])
    if seen.shape[0] == 0:
        return np.zeros_like(position)
    w = params.rank_weights(seen.shape[0])
    return (w[:, None] * (seen - position[None, :])).sum(axis=0)


def guidance_field(
    positions: np.ndarray,
    seen_positions: np.ndarray,
    ids: np.ndarray,
    counts: np.ndarray,
    params: GuidanceParams,
) -> tuple[np.ndarray, np.ndarray]:
    """Guidance velocities for all agents from one frozen snapshot.

    ``positions`` are the agents' own (current) positions, shape (N, M);
    ``seen_positions`` the possibly delayed foreign positions the group
    broadcast, shape (N, M); ``ids``/``counts`` the padded neighbor views
    from :func:`rendezvous.neighbors.select_all`.

    Returns ``(uc, valid)`` where ``valid`` is False for agents with an
    empty view (their uc is the zero vector).
    """
    n, m = positions.shape
    k = ids.shape[1]
    slot = np.arange(k)[None, :]
    active = slot < counts[:, None]
    gathered = seen_positions[np.clip(ids, 0, n - 1)]  # (N, K, M); inactive slots masked below
    offsets = np.where(active[:, :, None], gathered - positions[:, None, :], 0.0)
    if isinstance(params.weights, float):
        uc = params.weights * offsets.sum(axis=1)
    else:
        widest = int(counts.max(initial=0))
        if widest > len(params.weights):
            raise ValueError(f"view length {widest} exceeds the {len(params.weights)} configured rank weights")
        w = np.zeros(k)
        take = min(k, len(params.weights))
        w[:take] = params.weights[:take]
        uc = (w[None, :, None] * offsets).sum(axis=1)
    return uc, counts > 0
