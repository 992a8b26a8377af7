"""Tabletop pick-and-place simulator with a dual rigid/adhesive gripper,
Bayesian intent inference and blended shared control."""

from .scenario import (
    AdhesionParams,
    AssistParams,
    Box,
    GraspType,
    GripperParams,
    PhysicsParams,
    Pose,
    SceneObject,
    Scenario,
    load_scenario,
    save_scenario,
    scenario_hash,
)
from .world import ItemGroup, OperatorInput, SystemState, initial_state, step
from .inference import Belief, map_estimate, prior_belief, update
from .assist import assistance_action, assistance_raw, blend
from .agents import FrameOperator, ScriptOperator, SyntheticOperator, boltzmann_action
from .session import (
    EpisodeLog,
    MetricsReport,
    SessionLoop,
    compute_metrics,
    read_log,
    replay_log,
    run_episode,
    write_log,
)

__all__ = [
    "AdhesionParams",
    "AssistParams",
    "Belief",
    "Box",
    "EpisodeLog",
    "FrameOperator",
    "GraspType",
    "GripperParams",
    "ItemGroup",
    "MetricsReport",
    "OperatorInput",
    "PhysicsParams",
    "Pose",
    "SceneObject",
    "Scenario",
    "ScriptOperator",
    "SessionLoop",
    "SyntheticOperator",
    "SystemState",
    "assistance_action",
    "assistance_raw",
    "blend",
    "boltzmann_action",
    "compute_metrics",
    "initial_state",
    "load_scenario",
    "map_estimate",
    "prior_belief",
    "read_log",
    "replay_log",
    "run_episode",
    "save_scenario",
    "scenario_hash",
    "step",
    "update",
    "write_log",
]

__version__ = "0.1.0"
