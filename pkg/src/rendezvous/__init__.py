"""Nearest-neighbor rendezvous with a priority zone, for realistic agents.

A guidance layer steers single-integrator agents toward a common point
using only each agent's (priority-reordered) nearest neighbors; control
layers convert that guidance into accelerations for double integrators,
wheel/steering commands for car-like vehicles, and force/banking inputs
for fixed-wing aircraft. A deterministic engine simulates whole swarms
with delays, drift, saturation and scripted leaders, and a metrics layer
checks the protocol's convergence properties.
"""

from .dynamics import (
    GimbalError,
    NadfParams,
    StallError,
    UavParams,
    UgvParams,
    di_control,
    nadf,
    saturate,
    uav_control_rate,
    uav_dynamics,
    uav_jacobians,
    uav_kinematics,
    ugv_control,
    ugv_step,
)
from .engine import (
    DelayBuffer,
    Event,
    LeaderScript,
    ScenarioConfig,
    SimTrace,
    SimulationAbort,
    delayed_positions,
    init_scenario,
    run,
    step,
)
from .geometry import centroid, group_diameter, pairwise_distances
from .guidance import GuidanceParams, guidance_field, guidance_velocity
from .metrics import MetricsSeries, dm, dm_all, dxm, detect_tc, path_stats, tc_bound
from .neighbors import (
    DynamicPlain,
    DynamicPriority,
    FixedDigraph,
    ascending_order,
    priority_order,
    select_all,
    select_neighbors,
)

__version__ = "0.1.0"

__all__ = [
    "GimbalError", "NadfParams", "StallError", "UavParams", "UgvParams",
    "di_control", "nadf", "saturate", "uav_control_rate", "uav_dynamics",
    "uav_jacobians", "uav_kinematics", "ugv_control", "ugv_step",
    "DelayBuffer", "Event", "LeaderScript", "ScenarioConfig", "SimTrace",
    "SimulationAbort", "delayed_positions", "init_scenario", "run", "step",
    "centroid", "group_diameter", "pairwise_distances",
    "GuidanceParams", "guidance_field", "guidance_velocity",
    "MetricsSeries", "dm", "dm_all", "dxm", "detect_tc", "path_stats", "tc_bound",
    "DynamicPlain", "DynamicPriority", "FixedDigraph",
    "ascending_order", "priority_order", "select_all", "select_neighbors",
    "__version__",
]
