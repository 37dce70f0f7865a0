"""Synchronous simulation rounds: snapshot, select, guide, control, integrate.

Every step all agents act on the same frozen snapshot. Under a
communication delay each agent still knows its own state exactly but
sees foreign positions as they were tau seconds ago, and both neighbor
selection and guidance work from that stale view. Controls are applied
simultaneously, then scripted leaders override whatever the protocol
computed for them.

A run is fully determined by its ScenarioConfig (including the seed):
repeating it reproduces the trace bit for bit.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import metrics as _metrics
from .dynamics import (
    GimbalError,
    NadfParams,
    StallError,
    UavParams,
    UgvParams,
    di_control,
    rk4_step,
    saturate,
    uav_control_rate,
    uav_dynamics,
    uav_kinematics,
    ugv_control,
    ugv_step,
)
from .geometry import as_points, pairwise_distances
from .guidance import GuidanceParams, guidance_field
from .metrics import MetricsSeries, detect_tc, dm_all, path_stats, tc_bound
from .neighbors import DynamicPlain, DynamicPriority, FixedDigraph, GraphProvider, select_all

DYNAMICS_KINDS = ("single", "double", "ugv", "uav")


class SimulationAbort(RuntimeError):
    """A run stopped before t_max; carries the offending agent and time."""

    def __init__(self, agent: int, time: float, reason: str):
        self.agent = int(agent)
        self.time = float(time)
        self.reason = reason
        super().__init__(f"simulation aborted at t={time:.6g}: agent {agent}: {reason}")


@dataclass(frozen=True)
class LeaderScript:
    """Scripted motion that overrides the protocol for one agent.

    linear: constant velocity vector. sinusoidal: constant speed along x
    with y = amplitude * sin(omega * t), both relative to the agent's
    initial position.
    """

    agent: int
    kind: str = "linear"
    velocity: tuple[float, ...] = (0.0, 0.0)
    vx: float = 0.5
    amplitude: float = 1.0
    omega: float = 1.0

    def position_at(self, t: float, origin: np.ndarray) -> np.ndarray:
        if self.kind == "linear":
            return origin + np.asarray(self.velocity) * t
        pos = origin.copy()
        pos[0] += self.vx * t
        pos[1] += self.amplitude * math.sin(self.omega * t)
        return pos

    def velocity_at(self, t: float, dim: int) -> np.ndarray:
        if self.kind == "linear":
            return np.asarray(self.velocity, dtype=np.float64)
        vel = np.zeros(dim)
        vel[0] = self.vx
        vel[1] = self.amplitude * self.omega * math.cos(self.omega * t)
        return vel


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one experiment."""

    n: int
    dynamics: str
    provider: GraphProvider
    dim: int = 2
    dt: float = 0.01
    t_max: float | None = None
    delta: float = 0.02
    seed: int = 0
    guidance: GuidanceParams = GuidanceParams(1.0)
    init: str = "box"
    box: tuple[float, ...] | None = None
    radius: float | None = None
    positions: tuple[tuple[float, ...], ...] | None = None
    headings: tuple[float, ...] | None = None
    psi0: tuple[float, ...] | None = None
    v0: float = 1.0
    integrator: str = "euler"
    nadf: NadfParams | None = None
    ugv: UgvParams | None = None
    uav: UavParams | None = None
    delay: float = 0.0
    saturation: float | None = None
    drift: tuple[tuple[float, ...], ...] | None = None
    leader: LeaderScript | None = None


@dataclass
class Event:
    """Trace event: neighbor switches, saturation onsets, empty views."""

    step: int
    kind: str
    agent: int
    info: str = ""


@dataclass
class SimTrace:
    """Time-indexed record of one run.

    Row k holds the state at t_k together with the guidance and control
    computed from it (the commands applied over [t_k, t_k + dt]; the last
    row's commands are computed but never applied).
    """

    dynamics: str
    dt: float
    times: np.ndarray
    positions: np.ndarray                 # (S, N, M)
    uc: np.ndarray                        # (S, N, M)
    control: np.ndarray                   # (S, N, C)
    velocities: np.ndarray | None = None  # single/double
    headings: np.ndarray | None = None    # ugv
    flight: np.ndarray | None = None      # uav (v, gamma, psi)
    events: list[Event] = field(default_factory=list)
    warnings: tuple[str, ...] = ()
    config: ScenarioConfig | None = None

    @property
    def steps(self) -> int:
        return self.times.shape[0]


class DelayBuffer:
    """Ring of past position snapshots covering the communication delay.

    Reads before the ring fills return the oldest available sample, so a
    cold start behaves as if agents broadcast their initial positions.
    """

    def __init__(self, delay_steps: int):
        self.delay_steps = int(delay_steps)
        self._ring: deque[np.ndarray] = deque(maxlen=self.delay_steps + 1)

    def push(self, positions: np.ndarray) -> None:
        self._ring.append(np.array(positions, copy=True))

    def delayed(self) -> np.ndarray:
        return self._ring[0]


def delayed_positions(buffer: DelayBuffer) -> np.ndarray:
    """Positions as of time t - tau (oldest sample during warm-up)."""
    return buffer.delayed()


# ---------------------------------------------------------------------------
# Validation and initialization
# ---------------------------------------------------------------------------

def _fail(name: str, msg: str):
    raise ValueError(f"{name}: {msg}")


def validate_config(cfg: ScenarioConfig) -> None:
    """Reject invalid configs with a message naming the offending field."""
    if cfg.n < 1:
        _fail("n", f"need at least one agent, got {cfg.n}")
    if cfg.dim not in (1, 2, 3):
        _fail("dim", f"space dimension must be 1, 2 or 3, got {cfg.dim}")
    if cfg.dynamics not in DYNAMICS_KINDS:
        _fail("dynamics", f"unknown kind {cfg.dynamics!r}, expected one of {DYNAMICS_KINDS}")
    if cfg.dt <= 0:
        _fail("dt", f"time step must be positive, got {cfg.dt}")
    if cfg.t_max is not None and cfg.t_max <= cfg.dt:
        _fail("t_max", f"horizon must exceed dt={cfg.dt}, got {cfg.t_max}")
    if cfg.delta <= 0:
        _fail("delta", f"convergence radius must be positive, got {cfg.delta}")
    if cfg.delay < 0:
        _fail("delay", f"communication delay must be >= 0, got {cfg.delay}")
    if cfg.integrator not in ("euler", "rk4"):
        _fail("integrator", f"expected 'euler' or 'rk4', got {cfg.integrator!r}")

    if isinstance(cfg.provider, (DynamicPriority, DynamicPlain)):
        if cfg.n < 2:
            _fail("provider", "dynamic providers need at least two agents")
        if isinstance(cfg.guidance.weights, tuple) and len(cfg.guidance.weights) < cfg.provider.L:
            _fail("guidance", f"{len(cfg.guidance.weights)} rank weights cannot cover L={cfg.provider.L}")
    elif isinstance(cfg.provider, FixedDigraph):
        cfg.provider.validate(cfg.n)
        if isinstance(cfg.guidance.weights, tuple):
            widest = max((len(cfg.provider.out_neighbors(i)) for i in range(cfg.n)), default=0)
            if len(cfg.guidance.weights) < widest:
                _fail("guidance", f"{len(cfg.guidance.weights)} rank weights cannot cover out-degree {widest}")
    else:
        _fail("provider", f"unknown provider {cfg.provider!r}")

    if cfg.dynamics == "ugv" and cfg.dim != 2:
        _fail("dim", "ugv dynamics require a 2-D space")
    if cfg.dynamics == "uav" and cfg.dim != 3:
        _fail("dim", "uav dynamics require a 3-D space")

    if cfg.init == "box":
        if cfg.box is None or len(cfg.box) != cfg.dim:
            _fail("box", f"box init needs {cfg.dim} extent(s)")
        if any(e <= 0 for e in cfg.box):
            _fail("box", "box extents must be positive")
    elif cfg.init == "circle":
        if cfg.dim != 2:
            _fail("init", "circle init requires a 2-D space")
        if cfg.radius is None or cfg.radius <= 0:
            _fail("radius", "circle init needs a positive radius")
    elif cfg.init == "explicit":
        if cfg.positions is None or len(cfg.positions) != cfg.n:
            _fail("positions", f"explicit init needs exactly {cfg.n} positions")
        if any(len(p) != cfg.dim for p in cfg.positions):
            _fail("positions", f"every explicit position needs {cfg.dim} coordinate(s)")
    else:
        _fail("init", f"unknown init rule {cfg.init!r}")

    if cfg.headings is not None:
        if cfg.dynamics != "ugv":
            _fail("headings", "initial headings only apply to ugv dynamics")
        if len(cfg.headings) != cfg.n:
            _fail("headings", f"need {cfg.n} headings, got {len(cfg.headings)}")
    if cfg.psi0 is not None:
        if cfg.dynamics != "uav":
            _fail("psi0", "initial directional angles only apply to uav dynamics")
        if len(cfg.psi0) != cfg.n:
            _fail("psi0", f"need {cfg.n} angles, got {len(cfg.psi0)}")

    if cfg.dynamics == "uav":
        uav = cfg.uav or UavParams()
        if cfg.v0 < uav.v_floor:
            _fail("v0", f"initial speed {cfg.v0} is below the stall floor {uav.v_floor}")

    if cfg.drift is not None:
        if cfg.dynamics != "double":
            _fail("drift", "drift forces are only supported for double-integrator dynamics")
        if len(cfg.drift) != cfg.n:
            _fail("drift", f"need one drift vector per agent ({cfg.n}), got {len(cfg.drift)}")
        if any(len(d) != cfg.dim for d in cfg.drift):
            _fail("drift", f"every drift vector needs {cfg.dim} component(s)")

    if cfg.saturation is not None:
        if cfg.saturation <= 0:
            _fail("saturation", f"saturation limit must be positive, got {cfg.saturation}")
        if cfg.dynamics not in ("single", "double"):
            _fail("saturation", "component saturation applies to single/double dynamics only")

    if cfg.leader is not None:
        if not (0 <= cfg.leader.agent < cfg.n):
            _fail("leader", f"leader id {cfg.leader.agent} outside [0, {cfg.n})")
        if cfg.leader.kind not in ("linear", "sinusoidal"):
            _fail("leader", f"unknown trajectory kind {cfg.leader.kind!r}")
        if cfg.leader.kind == "linear" and len(cfg.leader.velocity) != cfg.dim:
            _fail("leader", f"linear leader velocity needs {cfg.dim} component(s)")
        if cfg.leader.kind == "sinusoidal" and cfg.dim != 2:
            _fail("leader", "sinusoidal leader requires a 2-D space")


@dataclass
class SimState:
    """Mutable state of a running simulation."""

    config: ScenarioConfig
    t_max: float
    n_steps: int
    delay_steps: int
    positions: np.ndarray
    velocities: np.ndarray
    headings: np.ndarray | None
    lam: np.ndarray | None
    u_state: np.ndarray | None
    buffer: DelayBuffer
    drift: np.ndarray | None
    leader_origin: np.ndarray | None
    t: float = 0.0
    k: int = 0
    warnings: list[str] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    # trace / metrics accumulators
    rows_time: list[float] = field(default_factory=list)
    rows_pos: list[np.ndarray] = field(default_factory=list)
    rows_vel: list[np.ndarray] = field(default_factory=list)
    rows_heading: list[np.ndarray] = field(default_factory=list)
    rows_flight: list[np.ndarray] = field(default_factory=list)
    rows_uc: list[np.ndarray] = field(default_factory=list)
    rows_ctrl: list[np.ndarray] = field(default_factory=list)
    rows_diam: list[float] = field(default_factory=list)
    rows_dxm: list[float] = field(default_factory=list)
    rows_dm: list[np.ndarray] = field(default_factory=list)
    rows_dmid: list[np.ndarray] = field(default_factory=list)
    prev_dm_ids: np.ndarray | None = None
    prev_empty: np.ndarray | None = None
    prev_sat: np.ndarray | None = None

    @property
    def metric_epsilon(self) -> float:
        prov = self.config.provider
        return prov.epsilon if isinstance(prov, DynamicPriority) else 0.0


def _initial_positions(cfg: ScenarioConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    if cfg.init == "box":
        return rng.random((cfg.n, cfg.dim)) * np.asarray(cfg.box)[None, :]
    if cfg.init == "circle":
        angles = 2.0 * np.pi * np.arange(cfg.n) / cfg.n
        return cfg.radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return as_points(cfg.positions).reshape(cfg.n, cfg.dim)


def _estimate_t_max(cfg: ScenarioConfig, positions: np.ndarray) -> float | None:
    """Horizon guess from the bound curve; None when not computable."""
    if not isinstance(cfg.provider, DynamicPriority) or cfg.provider.epsilon <= 0:
        return None
    w = cfg.guidance.weights
    rate = w if isinstance(w, float) else min(w)
    dx0 = float(pairwise_distances(positions).max())
    if dx0 <= 0:
        return 10.0 * cfg.dt
    bound = tc_bound(cfg.n, rate, min(cfg.provider.epsilon, dx0), dx0, 5.0 / rate)
    return 10.0 * bound


def init_scenario(cfg: ScenarioConfig) -> SimState:
    """Validate the config and build the initial simulation state."""
    validate_config(cfg)
    positions = _initial_positions(cfg)

    warnings: list[str] = []
    t_max = cfg.t_max
    if t_max is None:
        t_max = _estimate_t_max(cfg, positions)
        if t_max is None:
            _fail("t_max", "horizon required: it can only be estimated for a priority provider with epsilon > 0")
        warnings.append(f"t_max defaulted to {t_max:.6g} from the bound-curve estimate")

    delay_steps = int(round(cfg.delay / cfg.dt))
    if abs(delay_steps * cfg.dt - cfg.delay) > 1e-9 * max(1.0, cfg.delay):
        warnings.append(f"delay {cfg.delay} rounded to {delay_steps} steps ({delay_steps * cfg.dt:.6g})")

    velocities = np.zeros_like(positions)
    headings = None
    lam = None
    u_state = None
    if cfg.dynamics == "ugv":
        headings = np.asarray(cfg.headings, dtype=np.float64) if cfg.headings is not None else np.zeros(cfg.n)
    if cfg.dynamics == "uav":
        uav = cfg.uav or UavParams()
        psi = np.asarray(cfg.psi0, dtype=np.float64) if cfg.psi0 is not None else np.zeros(cfg.n)
        lam = np.stack([np.full(cfg.n, cfg.v0), np.zeros(cfg.n), psi], axis=1)
        # Level trim: zero thrust residual, lift balancing gravity, wings level.
        u_state = np.stack([np.zeros(cfg.n), np.full(cfg.n, uav.m * uav.g), np.zeros(cfg.n)], axis=1)

    leader_origin = None
    if cfg.leader is not None:
        leader_origin = positions[cfg.leader.agent].copy()

    drift = np.asarray(cfg.drift, dtype=np.float64) if cfg.drift is not None else None

    buffer = DelayBuffer(delay_steps)
    buffer.push(positions)

    return SimState(
        config=cfg,
        t_max=float(t_max),
        n_steps=int(round(t_max / cfg.dt)),
        delay_steps=delay_steps,
        positions=positions,
        velocities=velocities,
        headings=headings,
        lam=lam,
        u_state=u_state,
        buffer=buffer,
        drift=drift,
        leader_origin=leader_origin,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# One synchronous round
# ---------------------------------------------------------------------------

@dataclass
class _Round:
    d_true: np.ndarray
    seen: np.ndarray
    ids: np.ndarray
    counts: np.ndarray
    uc: np.ndarray
    control: np.ndarray
    empty: np.ndarray
    sat_hit: np.ndarray


def _compute_round(state: SimState) -> _Round:
    cfg = state.config
    pos = state.positions
    d_true = pairwise_distances(pos)
    if state.delay_steps > 0:
        seen = state.buffer.delayed()
        diff = seen[None, :, :] - pos[:, None, :]
        d_sel = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(d_sel, 0.0)
    else:
        seen = pos
        d_sel = d_true

    ids, counts = select_all(cfg.provider, d_sel)
    uc, valid = guidance_field(pos, seen, ids, counts, cfg.guidance)
    empty = ~valid

    sat_hit = np.zeros(cfg.n, dtype=bool)
    if cfg.dynamics == "single":
        control = uc
        if cfg.saturation is not None:
            control = saturate(uc, cfg.saturation)
            sat_hit = np.any(control != uc, axis=-1)
    elif cfg.dynamics == "double":
        raw = di_control(uc, state.velocities, cfg.nadf or NadfParams())
        control = raw
        if cfg.saturation is not None:
            control = saturate(raw, cfg.saturation)
            sat_hit = np.any(control != raw, axis=-1)
    elif cfg.dynamics == "ugv":
        omega_h, phi = ugv_control(uc, state.headings, cfg.ugv or UgvParams())
        control = np.stack([omega_h, phi], axis=-1)
    else:  # uav: the control signal is the integrated input state
        control = state.u_state.copy()
    return _Round(d_true, seen, ids, counts, uc, control, empty, sat_hit)


def _record_row(state: SimState, rnd: _Round) -> None:
    cfg = state.config
    state.rows_time.append(state.t)
    state.rows_pos.append(state.positions.copy())
    state.rows_uc.append(rnd.uc.copy())
    state.rows_ctrl.append(rnd.control.copy())
    if cfg.dynamics in ("single", "double"):
        state.rows_vel.append(state.velocities.copy())
    elif cfg.dynamics == "ugv":
        state.rows_heading.append(state.headings.copy())
    else:
        state.rows_flight.append(state.lam.copy())

    eps = state.metric_epsilon
    state.rows_diam.append(float(rnd.d_true.max()) if cfg.n > 1 else 0.0)
    values, ids = dm_all(rnd.d_true, eps) if cfg.n > 1 else (np.full(1, np.nan), np.full(1, -1))
    state.rows_dm.append(values)
    state.rows_dmid.append(ids)
    state.rows_dxm.append(float(np.nanmax(values)) if not np.isnan(values).all() else math.nan)

    k = state.k
    if state.prev_dm_ids is not None:
        switched = (ids != state.prev_dm_ids) & (ids >= 0) & (state.prev_dm_ids >= 0)
        for agent in np.nonzero(switched)[0]:
            state.events.append(Event(k, "switch", int(agent), f"{state.prev_dm_ids[agent]}->{ids[agent]}"))
    state.prev_dm_ids = ids

    if state.prev_empty is None:
        newly_empty = rnd.empty
    else:
        newly_empty = rnd.empty & ~state.prev_empty
    for agent in np.nonzero(newly_empty)[0]:
        state.events.append(Event(k, "empty_view", int(agent)))
    state.prev_empty = rnd.empty

    newly_sat = rnd.sat_hit if state.prev_sat is None else rnd.sat_hit & ~state.prev_sat
    for agent in np.nonzero(newly_sat)[0]:
        state.events.append(Event(k, "saturation", int(agent)))
    state.prev_sat = rnd.sat_hit


def _advance(state: SimState, rnd: _Round) -> None:
    cfg = state.config
    dt = cfg.dt

    if cfg.dynamics == "single":
        if cfg.integrator == "euler":
            new_pos = state.positions + dt * rnd.control
            applied_vel = rnd.control
        else:
            ids, counts = rnd.ids, rnd.counts

            def f(p):
                seen = p if state.delay_steps == 0 else rnd.seen
                vel, _ = guidance_field(p, seen, ids, counts, cfg.guidance)
                if cfg.saturation is not None:
                    vel = saturate(vel, cfg.saturation)
                return vel

            new_pos = rk4_step(f, state.positions, dt)
            applied_vel = (new_pos - state.positions) / dt
        state.positions = new_pos
        state.velocities = np.asarray(applied_vel, dtype=np.float64).copy()

    elif cfg.dynamics == "double":
        params = cfg.nadf or NadfParams()
        uc0 = rnd.uc
        drift = state.drift if state.drift is not None else 0.0
        n, m = state.positions.shape

        def f(y):
            x, v = y[:, :m], y[:, m:]
            acc = di_control(uc0, v, params)
            if cfg.saturation is not None:
                acc = saturate(acc, cfg.saturation)
            return np.concatenate([v, acc + drift], axis=1)

        y0 = np.concatenate([state.positions, state.velocities], axis=1)
        y1 = rk4_step(f, y0, dt)
        state.positions = y1[:, :m].copy()
        state.velocities = y1[:, m:].copy()

    elif cfg.dynamics == "ugv":
        params = cfg.ugv or UgvParams()
        poses = np.concatenate([state.positions, state.headings[:, None]], axis=1)
        new_poses = ugv_step(poses, rnd.control[:, 0], rnd.control[:, 1], dt, params)
        state.positions = new_poses[:, :2].copy()
        state.headings = new_poses[:, 2].copy()

    else:  # uav
        params = cfg.uav or UavParams()
        uc0 = rnd.uc

        def f(y):
            lam, u = y[:, 3:6], y[:, 6:9]
            return np.concatenate(
                [uav_kinematics(lam), uav_dynamics(lam, u, params), uav_control_rate(uc0, lam, u, params)],
                axis=1,
            )

        y0 = np.concatenate([state.positions, state.lam, state.u_state], axis=1)
        try:
            y1 = rk4_step(f, y0, dt)
        except (StallError, GimbalError) as exc:
            raise SimulationAbort(exc.agent, state.t, str(exc)) from exc
        state.positions = y1[:, :3].copy()
        state.lam = y1[:, 3:6].copy()
        state.u_state = y1[:, 6:9].copy()

    state.t += dt
    state.k += 1

    if cfg.leader is not None:
        lead = cfg.leader
        state.positions[lead.agent] = lead.position_at(state.t, state.leader_origin)
        vel = lead.velocity_at(state.t, cfg.dim)
        if cfg.dynamics in ("single", "double"):
            state.velocities[lead.agent] = vel
        elif cfg.dynamics == "ugv":
            speed = float(np.linalg.norm(vel))
            if speed > 1e-12:
                state.headings[lead.agent] = math.atan2(vel[1], vel[0])
        else:
            speed = float(np.linalg.norm(vel))
            horiz = float(np.hypot(vel[0], vel[1]))
            state.lam[lead.agent] = (speed, math.atan2(vel[2], horiz) if speed > 1e-12 else 0.0,
                                     math.atan2(vel[1], vel[0]) if horiz > 1e-12 else 0.0)

    state.buffer.push(state.positions)


def step(state: SimState) -> SimState:
    """One synchronous round: record the current row, then integrate dt."""
    rnd = _compute_round(state)
    _record_row(state, rnd)
    _advance(state, rnd)
    return state


def _build_trace(state: SimState) -> SimTrace:
    cfg = state.config
    trace = SimTrace(
        dynamics=cfg.dynamics,
        dt=cfg.dt,
        times=np.asarray(state.rows_time),
        positions=np.stack(state.rows_pos),
        uc=np.stack(state.rows_uc),
        control=np.stack(state.rows_ctrl),
        events=state.events,
        warnings=tuple(state.warnings),
        config=cfg,
    )
    if cfg.dynamics in ("single", "double"):
        trace.velocities = np.stack(state.rows_vel)
    elif cfg.dynamics == "ugv":
        trace.headings = np.stack(state.rows_heading)
    else:
        trace.flight = np.stack(state.rows_flight)
    return trace


def _build_metrics(state: SimState) -> MetricsSeries:
    cfg = state.config
    times = np.asarray(state.rows_time)
    diameter = np.asarray(state.rows_diam)
    dxm_series = np.asarray(state.rows_dxm)
    positions = np.stack(state.rows_pos)
    series = MetricsSeries(
        times=times,
        diameter=diameter,
        dxm=dxm_series,
        dm_values=np.stack(state.rows_dm),
        dm_ids=np.stack(state.rows_dmid),
    )
    tc = detect_tc(times, diameter, cfg.delta)
    if tc is not None:
        series.t_c_steps, series.t_c_time = tc
        series.converged = True
    series.dl, series.delta_path = path_stats(positions)
    series.max_dxm = float(np.nanmax(dxm_series)) if not np.isnan(dxm_series).all() else math.nan
    if positions.shape[0] > 1:
        disp = np.linalg.norm(np.diff(positions, axis=0), axis=2)
        series.max_speed = float(disp.max()) / cfg.dt
    return series


def run(cfg: ScenarioConfig) -> tuple[SimTrace, MetricsSeries]:
    """Run a scenario to its horizon; returns the trace and the metrics.

    Convergence time is the first moment the group diameter drops below
    delta and stays there through t_max. Aborts (UAV stall / gimbal)
    raise SimulationAbort.
    """
    state = init_scenario(cfg)
    for _ in range(state.n_steps):
        step(state)
    final = _compute_round(state)
    _record_row(state, final)
    return _build_trace(state), _build_metrics(state)
