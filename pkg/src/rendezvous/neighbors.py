"""Neighbor ordering and selection: who each agent listens to this round.

Three graph providers are supported:

* ``DynamicPlain`` -- the conventional protocol: each agent uses its L
  nearest neighbors, closest first.
* ``DynamicPriority`` -- the modified protocol: neighbors beyond the
  priority radius epsilon come first (ascending distance), neighbors
  inside the priority zone are demoted to the back of the buffer in
  descending distance, so the nearest agents are consulted last.
* ``FixedDigraph`` -- a static directed communication graph; each agent
  uses exactly its out-edge targets.

All ordering ties break toward the smaller agent id, which makes runs
bitwise reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import POSITION_TOL

# Distance below which two agents count as coincident for selection.
COINCIDENT_TOL = POSITION_TOL


@dataclass(frozen=True)
class DynamicPriority:
    """Priority-zone provider: radius epsilon, buffer head length L."""

    epsilon: float
    L: int = 1

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")


@dataclass(frozen=True)
class DynamicPlain:
    """Conventional nearest-neighbor provider with L neighbors."""

    L: int = 1

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")


@dataclass(frozen=True)
class FixedDigraph:
    """Static directed graph given as (from_id, to_id) edges."""

    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))

    def validate(self, n: int) -> None:
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) references an agent outside [0, {n})")
            if a == b:
                raise ValueError(f"self-loop edge ({a}, {b}) is not allowed")

    def out_neighbors(self, i: int) -> list[int]:
        """Out-edge targets of node i, in edge order."""
        return [b for a, b in self.edges if a == i]


GraphProvider = DynamicPriority | DynamicPlain | FixedDigraph


def ascending_order(dist: np.ndarray, i: int) -> np.ndarray:
    """All other agent ids sorted by distance from agent i, nearest first.

    Ties break toward the smaller id.
    """
    row = np.asarray(dist)[i]
    order = np.argsort(row, kind="stable")
    return order[order != i]


def priority_order(dist: np.ndarray, i: int, epsilon: float) -> np.ndarray:
    """Priority-buffer ordering of all other agents relative to agent i.

    Agents at distance >= epsilon (high priority) come first in ascending
    distance; agents strictly inside the priority zone follow in
    descending distance, so the buffer ends with the nearest agents.
    """
    row = np.asarray(dist)[i]
    n = row.shape[0]
    ids = np.arange(n)
    others = ids != i
    inside = others & (row < epsilon)
    outside = others & ~inside

    out_ids = ids[outside]
    out_ids = out_ids[np.argsort(row[outside], kind="stable")]
    in_ids = ids[inside]
    in_ids = in_ids[np.argsort(-row[inside], kind="stable")]
    return np.concatenate([out_ids, in_ids])


def select_neighbors(provider: GraphProvider, dist: np.ndarray, i: int) -> np.ndarray:
    """The ordered neighbor ids agent i may use this round.

    Dynamic providers return the first L entries of their ordering. For
    the priority provider with L=1 coincident agents are skipped entirely
    (the protocol only acts on agents at non-zero distance); with L > 1
    they may appear in the buffer but contribute zero velocity anyway.
    A fixed-graph node with no out-edges gets an empty view.
    """
    if isinstance(provider, FixedDigraph):
        return np.asarray(provider.out_neighbors(i), dtype=np.intp)
    if isinstance(provider, DynamicPriority):
        order = priority_order(dist, i, provider.epsilon)
        if provider.L == 1:
            row = np.asarray(dist)[i]
            order = order[row[order] > COINCIDENT_TOL]
        return order[: provider.L]
    if isinstance(provider, DynamicPlain):
        return ascending_order(dist, i)[: provider.L]
    raise TypeError(f"unknown graph provider {provider!r}")


def select_all(provider: GraphProvider, dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized neighbor selection for every agent at once.

    Returns ``(ids, counts)`` where ``ids`` has shape (N, K) padded with -1
    past each agent's view length and ``counts`` holds the view lengths.
    Equivalent to calling :func:`select_neighbors` per agent.
    """
    dist = np.asarray(dist)
    n = dist.shape[0]

    if isinstance(provider, FixedDigraph):
        views = [provider.out_neighbors(i) for i in range(n)]
        width = max((len(v) for v in views), default=0)
        width = max(width, 1)
        ids = np.full((n, width), -1, dtype=np.intp)
        counts = np.zeros(n, dtype=np.intp)
        for i, view in enumerate(views):
            ids[i, : len(view)] = view
            counts[i] = len(view)
        return ids, counts

    if isinstance(provider, DynamicPriority):
        eps = provider.epsilon
        # Single sort key realizing the priority buffer: outside agents keep
        # their distance, inside agents map to big - d so they sort after all
        # outside agents in descending distance. Stable sort ties by id.
        big = 2.0 * float(dist.max(initial=0.0)) + eps + 1.0
        keys = np.where(dist >= eps, dist, big - dist)
        np.fill_diagonal(keys, np.inf)
        if provider.L == 1:
            keys[dist <= COINCIDENT_TOL] = np.inf
            np.fill_diagonal(keys, np.inf)
            best = np.argmin(keys, axis=1)
            counts = (np.isfinite(keys[np.arange(n), best])).astype(np.intp)
            ids = np.where(counts > 0, best, -1).astype(np.intp).reshape(n, 1)
            return ids, counts
        order = np.argsort(keys, axis=1, kind="stable")[:, : provider.L]
        avail = min(provider.L, n - 1)
        counts = np.full(n, avail, dtype=np.intp)
        ids = np.where(np.arange(order.shape[1])[None, :] < counts[:, None], order, -1)
        return ids.astype(np.intp), counts

    if isinstance(provider, DynamicPlain):
        keys = dist.astype(np.float64, copy=True)
        np.fill_diagonal(keys, np.inf)
        order = np.argsort(keys, axis=1, kind="stable")[:, : provider.L]
        avail = min(provider.L, n - 1)
        counts = np.full(n, avail, dtype=np.intp)
        ids = np.where(np.arange(order.shape[1])[None, :] < counts[:, None], order, -1)
        return ids.astype(np.intp), counts

    raise TypeError(f"unknown graph provider {provider!r}")
