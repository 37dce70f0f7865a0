"""Analysis quantities: per-step distances, convergence time, monitors.

Everything here is a pure function of recorded data; the engine calls
the per-step helpers while running and the monitors re-derive whatever
they need from stored positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import pairwise_distances


@dataclass
class MetricsSeries:
    """Per-step and per-run analysis record of one simulation.

    Per step: group diameter, d_xm (largest nearest-outside distance,
    NaN once every agent's candidate set is empty) and per-agent dm_i
    with the achieving neighbor id (-1 when undefined). Per run: the
    convergence time in steps and model time (None when the group never
    enters and stays inside the delta-sphere), mean path length dL, path
    spread delta_path, and the largest observed agent speed.
    """

    times: np.ndarray
    diameter: np.ndarray
    dxm: np.ndarray
    dm_values: np.ndarray        # (S, N)
    dm_ids: np.ndarray           # (S, N) int, -1 = undefined
    t_c_steps: int | None = None
    t_c_time: float | None = None
    converged: bool = False
    dl: float = 0.0
    delta_path: float = 0.0
    max_dxm: float = math.nan
    max_speed: float = 0.0


def dm(dist: np.ndarray, i: int, epsilon: float) -> tuple[float, int] | None:
    """Distance and id of agent i's nearest neighbor outside the priority zone.

    Candidates are agents at distance strictly greater than epsilon; ties
    break toward the smaller id. None when every other agent is inside.
    """
    row = np.asarray(dist)[i].astype(np.float64, copy=True)
    row[i] = -np.inf
    mask = row > epsilon
    if not mask.any():
        return None
    masked = np.where(mask, row, np.inf)
    j = int(np.argmin(masked))
    return float(row[j]), j


def dm_all(dist: np.ndarray, epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized dm for every agent: (values, ids) with NaN/-1 when undefined."""
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    masked = np.where(dist > epsilon, dist, np.inf)
    np.fill_diagonal(masked, np.inf)
    ids = np.argmin(masked, axis=1)
    values = masked[np.arange(n), ids]
    defined = np.isfinite(values)
    return np.where(defined, values, np.nan), np.where(defined, ids, -1)


def dxm(dist: np.ndarray, epsilon: float) -> float | None:
    """Largest nearest-outside distance over the group (communication proxy)."""
    values, _ = dm_all(dist, epsilon)
    if np.isnan(values).all():
        return None
    return float(np.nanmax(values))


def path_stats(positions: np.ndarray) -> tuple[float, float]:
    """Mean path length and max-min path spread from an (S, N, M) trajectory.

    Path length is the chord sum of per-step displacements.
    """
    positions = np.asarray(positions, dtype=np.float64)
    if positions.ndim != 3 or positions.shape[0] < 1:
        raise ValueError("expected a nonempty (S, N, M) position history")
    if positions.shape[0] == 1:
        return 0.0, 0.0
    steps = np.linalg.norm(np.diff(positions, axis=0), axis=2)  # (S-1, N)
    lengths = steps.sum(axis=0)
    return float(lengths.mean()), float(lengths.max() - lengths.min())


def tc_bound(k: int, a: float, epsilon: float, dx0: float, c1: float) -> float:
    """Convergence-time bound curve -(K/a) ln(eps/dx0) + C1.

    epsilon <= 0 returns +inf (no guarantee without a priority zone);
    epsilon >= dx0 returns C1 alone (the whole group already sits inside
    one priority zone, so the time no longer depends on epsilon).
    """
    if k < 1 or a <= 0:
        raise ValueError("K must be a positive integer and a a positive rate")
    if dx0 <= 0:
        raise ValueError("dx0 must be positive")
    if epsilon <= 0:
        return math.inf
    if epsilon >= dx0:
        return float(c1)
    return -(k / a) * math.log(epsilon / dx0) + c1


def detect_tc(times: np.ndarray, diameter: np.ndarray, delta: float) -> tuple[int, float] | None:
    """First step after which the diameter stays below delta, or None.

    Implements the enter-and-stay clause: the step found is the first one
    from which every later diameter sample is < delta through the end of
    the run.
    """
    times = np.asarray(times)
    diameter = np.asarray(diameter)
    above = np.nonzero(diameter >= delta)[0]
    if above.size == 0:
        return 0, float(times[0])
    last = int(above[-1])
    if last == diameter.shape[0] - 1:
        return None
    return last + 1, float(times[last + 1])


# ---------------------------------------------------------------------------
# Proposition monitors
# ---------------------------------------------------------------------------

@dataclass
class MonitorReport:
    """Outcome of a trace-level invariant check."""

    ok: bool
    violations: list[tuple] = field(default_factory=list)
    detail: dict = field(default_factory=dict)


def check_dm_monotone(dm_values: np.ndarray, dm_ids: np.ndarray, tol: float) -> MonitorReport:
    """Per-agent dm_i must not increase while its nearest-outside identity holds.

    Steps where the tracked identity switches (or dm becomes undefined)
    are exempt; tol absorbs time discretization, conventionally
    2 * dt * max_speed. Violations are (step, agent, increase) tuples.
    """
    dm_values = np.asarray(dm_values)
    dm_ids = np.asarray(dm_ids)
    same = (dm_ids[1:] == dm_ids[:-1]) & (dm_ids[:-1] >= 0)
    increase = dm_values[1:] - dm_values[:-1]
    bad = same & (increase > tol)
    violations = [(int(s) + 1, int(a), float(increase[s, a])) for s, a in zip(*np.nonzero(bad))]
    return MonitorReport(ok=not violations, violations=violations)


def check_diameter_decreasing(diameter: np.ndarray, delta: float, slack: float = 1e-12) -> MonitorReport:
    """Group diameter must strictly decrease while it is still >= delta."""
    diameter = np.asarray(diameter)
    active = diameter[:-1] >= delta
    rise = diameter[1:] - diameter[:-1]
    bad = active & (rise >= -slack)
    violations = [(int(s) + 1, float(rise[s])) for s in np.nonzero(bad)[0]]
    return MonitorReport(ok=not violations, violations=violations)


def check_zone_capture(positions: np.ndarray, epsilon: float, tol: float) -> MonitorReport:
    """Once a pair's distance drops below epsilon it must stay below epsilon + tol.

    Trace-level proxy for the capture property of the priority zone.
    Violations are (step, i, j, distance) tuples.
    """
    positions = np.asarray(positions)
    n = positions.shape[1]
    captured = np.zeros((n, n), dtype=bool)
    violations: list[tuple] = []
    for s in range(positions.shape[0]):
        d = pairwise_distances(positions[s])
        escaped = captured & (d >= epsilon + tol)
        for i, j in zip(*np.nonzero(escaped)):
            if i != j:
                violations.append((s, int(i), int(j), float(d[i, j])))
        captured |= d < epsilon
        np.fill_diagonal(captured, False)
    return MonitorReport(ok=not violations, violations=violations)


def check_shared_zone_bound(positions: np.ndarray, epsilon: float) -> MonitorReport:
    """The 2-epsilon bound on d_xm whenever priority zones share an agent.

    Per step, two readings of the sharing hypothesis are evaluated:

    * pair: some agent lies in both priority zones of the pair that
      achieves d_xm;
    * universal: every pair of distinct agents shares some third agent
      between their zones.

    A violation is any step where a hypothesis held but d_xm >= 2*epsilon.
    The detail dict carries the per-step hypothesis flags and dxm series.
    """
    positions = np.asarray(positions)
    s_total = positions.shape[0]
    dxm_series = np.full(s_total, np.nan)
    pair_held = np.zeros(s_total, dtype=bool)
    universal_held = np.zeros(s_total, dtype=bool)
    violations: list[tuple] = []
    for s in range(s_total):
        d = pairwise_distances(positions[s])
        inside = d < epsilon
        np.fill_diagonal(inside, False)
        shared = (inside.astype(np.int64) @ inside.astype(np.int64).T) > 0
        values, ids = dm_all(d, epsilon)
        if np.isnan(values).all():
            continue
        worst = int(np.nanargmax(values))
        partner = int(ids[worst])
        dxm_series[s] = values[worst]
        pair_held[s] = bool(shared[worst, partner])
        off_diag = ~np.eye(d.shape[0], dtype=bool)
        universal_held[s] = bool(shared[off_diag].all())
        if dxm_series[s] >= 2.0 * epsilon:
            if pair_held[s]:
                violations.append((s, "pair", float(dxm_series[s])))
            if universal_held[s]:
                violations.append((s, "universal", float(dxm_series[s])))
    return MonitorReport(
        ok=not violations,
        violations=violations,
        detail={"dxm": dxm_series, "pair_held": pair_held, "universal_held": universal_held},
    )


def energy_series(diameter: np.ndarray, velocities: np.ndarray) -> np.ndarray:
    """Energy-like diagnostic: diameter^2 + total squared speed per step."""
    diameter = np.asarray(diameter)
    velocities = np.asarray(velocities)
    return diameter**2 + (velocities**2).sum(axis=(1, 2))


def check_energy_decay(diameter: np.ndarray, velocities: np.ndarray, transient_frac: float = 0.05,
                       slack_frac: float = 1e-6) -> MonitorReport:
    """Energy diagnostic must be nonincreasing after the initial transient."""
    e = energy_series(diameter, velocities)
    start = int(math.ceil(transient_frac * (e.shape[0] - 1)))
    tail = e[start:]
    slack = slack_frac * float(e.max(initial=0.0))
    rise = np.diff(tail)
    bad = np.nonzero(rise > slack)[0]
    violations = [(int(s) + start + 1, float(rise[s])) for s in bad]
    return MonitorReport(ok=not violations, violations=violations, detail={"energy": e})
