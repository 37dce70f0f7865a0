"""Conversions from the guidance velocity to agent motion.

Four dynamics classes are supported:

* single integrator -- the guidance velocity is followed directly;
* double integrator -- acceleration control with nonlinear anisotropic
  damping (NADF) that selectively impedes velocity components which do
  not serve the guidance direction;
* car-like UGV -- front-wheel-steered vehicle; the guidance vector is
  turned into wheel angular speed and a steering angle so the closed
  loop realizes speed K1*|uc| and heading rate K2*wrap(arg(uc) - theta);
* fixed-wing UAV -- point-mass flight model controlled through a
  Jacobian-transpose rate law on the force/banking inputs.

All functions are pure and broadcast over a leading agent axis, so the
same code serves unit tests on single vectors and the engine on whole
swarms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_UC_FLOOR_DEFAULT = 1e-9


class StallError(RuntimeError):
    """UAV airspeed fell below the stall guard."""

    def __init__(self, agent: int, speed: float, floor: float):
        self.agent = int(agent)
        self.speed = float(speed)
        super().__init__(f"agent {agent} stalled: speed {speed:.6g} below floor {floor:.6g}")


class GimbalError(RuntimeError):
    """UAV flight-path angle reached +-pi/2; directional angle undefined."""

    def __init__(self, agent: int, gamma: float):
        self.agent = int(agent)
        self.gamma = float(gamma)
        super().__init__(f"agent {agent} hit gimbal lock: cos(gamma) ~ 0 at gamma={gamma:.6g}")


@dataclass(frozen=True)
class NadfParams:
    """Double-integrator controller gains.

    b is the linear damping coefficient, k_d the anisotropic damping gain.
    Below guidance_floor the guidance vector is treated as zero and the
    damping becomes isotropic (the unit guidance direction is undefined
    there). heaviside_mode picks which aligned velocity component is
    damped: "oppose-only" (default) damps motion running against the
    guidance vector, "as-printed" damps motion running with it.
    """

    b: float = 2.0
    k_d: float = 150.0
    guidance_floor: float = _UC_FLOOR_DEFAULT
    heaviside_mode: str = "oppose-only"

    def __post_init__(self):
        if self.b < 0 or self.k_d < 0:
            raise ValueError("damping coefficients must be >= 0")
        if self.guidance_floor <= 0:
            raise ValueError("guidance_floor must be > 0")
        if self.heaviside_mode not in ("oppose-only", "as-printed"):
            raise ValueError(f"unknown heaviside_mode {self.heaviside_mode!r}")


@dataclass(frozen=True)
class UgvParams:
    """Car-like vehicle geometry and guidance-tracking gains (K2 >> K1)."""

    k1: float = 0.5
    k2: float = 4.0
    r: float = 0.1
    l_n: float = 0.5
    phi_limit: float = 0.49 * np.pi

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("K1 and K2 must be positive")
        if self.r <= 0 or self.l_n <= 0:
            raise ValueError("wheel radius and axle distance must be positive")
        if not (0 < self.phi_limit < np.pi / 2):
            raise ValueError("phi_limit must lie in (0, pi/2)")


@dataclass(frozen=True)
class UavParams:
    """Fixed-wing point-mass constants and controller gains."""

    m: float = 1.0
    g: float = 9.81
    k_u: float = 20.0
    k_lam: float = 2.0
    v_floor: float = 0.1

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if self.g < 0:
            raise ValueError("gravity must be >= 0")
        if self.k_u < 0 or self.k_lam < 0:
            raise ValueError("controller gains must be >= 0")
        if self.v_floor <= 0:
            raise ValueError("v_floor must be positive")


def wrap_angle(x):
    """Map angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=np.float64), 2.0 * np.pi)


def saturate(u, limit: float) -> np.ndarray:
    """Clamp every component of u to [-limit, +limit]."""
    if limit <= 0:
        raise ValueError(f"saturation limit must be positive, got {limit}")
    return np.clip(np.asarray(u, dtype=np.float64), -limit, limit)


def rk4_step(f, y: np.ndarray, dt: float) -> np.ndarray:
    """One fixed-step classical Runge-Kutta update of y' = f(y)."""
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# ---------------------------------------------------------------------------
# Double integrator with NADF
# ---------------------------------------------------------------------------

def nadf(uc, v, params: NadfParams) -> np.ndarray:
    """Anisotropically damped velocity component.

    The part of v orthogonal to uc is always returned; the aligned part
    is added only when the heaviside gate fires (by default: when the
    agent moves against the guidance vector). When |uc| is below the
    floor the full velocity is returned, i.e. damping is isotropic at
    the degenerate point. In every mode v . nadf(uc, v) >= 0, the sign
    condition the convergence argument needs.
    """
    uc = np.asarray(uc, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(uc, axis=-1, keepdims=True)
    degenerate = norm <= params.guidance_floor
    u = np.where(degenerate, 0.0, uc / np.where(degenerate, 1.0, norm))
    proj = (u * v).sum(axis=-1, keepdims=True)
    orth = v - proj * u
    if params.heaviside_mode == "as-printed":
        gate = proj > 0.0
    else:
        gate = proj < 0.0
    damped = orth + np.where(gate, proj * u, 0.0)
    return np.where(degenerate, v, damped)


def di_control(uc, v, params: NadfParams) -> np.ndarray:
    """Double-integrator acceleration: uc - b*v - k_d*nadf(uc, v)."""
    uc = np.asarray(uc, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return uc - params.b * v - params.k_d * nadf(uc, v, params)


# ---------------------------------------------------------------------------
# Car-like UGV
# ---------------------------------------------------------------------------

def ugv_control(uc, theta, params: UgvParams) -> tuple[np.ndarray, np.ndarray]:
    """Wheel angular speed and steering angle realizing the guidance law.

    Substituted into the vehicle kinematics the returned pair gives
    tangential speed K1*|uc| and heading rate K2*wrap(arg(uc) - theta)
    (exactly, unless the steering clamp engages). A zero guidance vector
    parks the vehicle.
    """
    uc = np.asarray(uc, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    speed = np.linalg.norm(uc, axis=-1)
    moving = speed > _UC_FLOOR_DEFAULT
    v_cmd = params.k1 * speed
    heading_err = wrap_angle(np.arctan2(uc[..., 1], uc[..., 0]) - theta)
    omega_cmd = params.k2 * heading_err
    omega_h = np.where(moving, v_cmd / params.r, 0.0)
    # Bicycle relation omega = (v / l_n) tan(phi), inverted for phi.
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.arctan(omega_cmd * params.l_n / np.where(moving, v_cmd, 1.0))
    phi = np.where(moving, np.clip(phi, -params.phi_limit, params.phi_limit), 0.0)
    return omega_h, phi


def ugv_step(pose, omega_h, phi, dt: float, params: UgvParams) -> np.ndarray:
    """Advance poses (x, y, theta) one RK4 step under held wheel controls."""
    pose = np.asarray(pose, dtype=np.float64)
    v = params.r * np.asarray(omega_h, dtype=np.float64)
    omega = v / params.l_n * np.tan(np.asarray(phi, dtype=np.float64))

    def f(p):
        th = p[..., 2]
        return np.stack([v * np.cos(th), v * np.sin(th), np.broadcast_to(omega, th.shape)], axis=-1)

    return rk4_step(f, pose, dt)


# ---------------------------------------------------------------------------
# Fixed-wing UAV
# ---------------------------------------------------------------------------

def uav_kinematics(lam) -> np.ndarray:
    """World-frame velocity of the aircraft from (v, gamma, psi)."""
    lam = np.asarray(lam, dtype=np.float64)
    v, gamma, psi = lam[..., 0], lam[..., 1], lam[..., 2]
    cg = np.cos(gamma)
    return np.stack([v * cg * np.cos(psi), v * cg * np.sin(psi), v * np.sin(gamma)], axis=-1)


def _uav_guard(lam, params: UavParams) -> None:
    lam = np.asarray(lam, dtype=np.float64)
    v = np.atleast_1d(lam[..., 0])
    cg = np.atleast_1d(np.cos(lam[..., 1]))
    stalled = v < params.v_floor
    if np.any(stalled):
        agent = int(np.argmax(stalled))
        raise StallError(agent, float(v[agent]), params.v_floor)
    locked = np.abs(cg) < 1e-9
    if np.any(locked):
        agent = int(np.argmax(locked))
        raise GimbalError(agent, float(np.atleast_1d(lam[..., 1])[agent]))


def uav_dynamics(lam, u, params: UavParams) -> np.ndarray:
    """Rates (v', gamma', psi') under tangential/normal force and banking.

    gamma' uses the dimensionally consistent (F_N cos(eta) - m g cos(gamma))
    / (m v) form. Aborts with StallError / GimbalError when the state
    leaves the model's validity region.
    """
    _uav_guard(lam, params)
    lam = np.asarray(lam, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v, gamma = lam[..., 0], lam[..., 1]
    ft, fn, eta = u[..., 0], u[..., 1], u[..., 2]
    m, g = params.m, params.g
    v_dot = ft / m - g * np.sin(gamma)
    gamma_dot = (fn * np.cos(eta) - m * g * np.cos(gamma)) / (m * v)
    psi_dot = fn * np.sin(eta) / (m * v * np.cos(gamma))
    return np.stack([v_dot, gamma_dot, psi_dot], axis=-1)


def uav_jacobians(lam, u, params: UavParams) -> tuple[np.ndarray, np.ndarray]:
    """Analytic Jacobians (J_lam, J_u).

    J_lam differentiates the world-frame velocity with respect to
    (v, gamma, psi); J_u differentiates the local rates with respect to
    (F_T, F_N, eta). Shapes broadcast: (..., 3, 3).
    """
    _uav_guard(lam, params)
    lam = np.asarray(lam, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v, gamma, psi = lam[..., 0], lam[..., 1], lam[..., 2]
    fn, eta = u[..., 1], u[..., 2]
    m = params.m
    cg, sg = np.cos(gamma), np.sin(gamma)
    cp, sp = np.cos(psi), np.sin(psi)
    ce, se = np.cos(eta), np.sin(eta)
    zero = np.zeros_like(v)

    j_lam = np.stack(
        [
            np.stack([cg * cp, -v * sg * cp, -v * cg * sp], axis=-1),
            np.stack([cg * sp, -v * sg * sp, v * cg * cp], axis=-1),
            np.stack([sg, v * cg, zero], axis=-1),
        ],
        axis=-2,
    )
    j_u = np.stack(
        [
            np.stack([np.full_like(v, 1.0 / m), zero, zero], axis=-1),
            np.stack([zero, ce / (m * v), -fn * se / (m * v)], axis=-1),
            np.stack([zero, se / (m * v * cg), fn * ce / (m * v * cg)], axis=-1),
        ],
        axis=-2,
    )
    return j_lam, j_u


def uav_control_rate(uc, lam, u, params: UavParams) -> np.ndarray:
    """Rate of the integrated control (F_T, F_N, eta).

    Jacobian-transpose law: the world-frame velocity error is pulled back
    through J_lam into desired local rates, the current rates Q(lam, u)
    are subtracted, and the residual is pulled back through J_u onto the
    control inputs.
    """
    uc = np.asarray(uc, dtype=np.float64)
    j_lam, j_u = uav_jacobians(lam, u, params)
    vel_err = uc - uav_kinematics(lam)
    lam_rate_err = params.k_lam * np.einsum("...ji,...j->...i", j_lam, vel_err) - uav_dynamics(lam, u, params)
    return params.k_u * np.einsum("...ji,...j->...i", j_u, lam_rate_err)
