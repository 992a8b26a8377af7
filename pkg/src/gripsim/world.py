"""World state and the deterministic transition function.

The end-effector integrates a commanded velocity under a workspace clamp;
gripper force and chamber pressure integrate operator increments with
saturation; held item groups ride their grasp frame rigidly; free groups fall
to the table (or the bin floor). Everything is a pure function of immutable
values, so identical inputs give bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .adhesion import delay_ticks
from .scenario import GraspType, Pose, Scenario


@dataclass(frozen=True)
class OperatorInput:
    """One tick of operator commands: arm velocity plus channel increments."""

    a_h: tuple[float, float, float] = (0.0, 0.0, 0.0)
    df: float = 0.0
    dp: float = 0.0
    active: bool = False

    @staticmethod
    def make(a_h=(0.0, 0.0, 0.0), df=0.0, dp=0.0, v_max: float | None = None) -> "OperatorInput":
        """Build an input, clamping the velocity norm and deriving ``active``."""
        ax, ay, az = (float(v) for v in a_h)
        if not all(map(math.isfinite, (ax, ay, az))):
            raise ValueError("velocity command has non-finite components")
        if v_max is not None:
            n = math.sqrt(ax * ax + ay * ay + az * az)
            if n > v_max:
                s = v_max / n
                ax, ay, az = ax * s, ay * s, az * s
        df = float(df)
        dp = float(dp)
        active = (ax, ay, az) != (0.0, 0.0, 0.0) or df != 0.0 or dp != 0.0
        return OperatorInput((ax, ay, az), df, dp, active)


ZERO_INPUT = OperatorInput()


@dataclass(frozen=True)
class ItemGroup:
    """A contiguous batch of identical items sharing one pose.

    Piles fragment into groups as subsets get picked up and put down; ``key``
    stays unique within the episode. ``hold_offset`` is the pose relative to
    the grasp frame, frozen at attach time.
    """

    object_id: str
    key: str
    count: int
    pose: Pose
    vz: float = 0.0
    held_by: str | None = None
    hold_offset: Pose | None = None


@dataclass(frozen=True)
class SystemState:
    """Complete simulation state at one tick."""

    ee: Pose
    f: float  # rigid pinch force, N
    pressure: float  # shared chamber pressure, psi
    tick: int
    time: float
    groups: tuple[ItemGroup, ...]
    # Commanded-pressure history (tick, psi), trimmed to the switching window.
    pressure_log: tuple[tuple[int, float], ...]

    @property
    def attachments(self) -> tuple[tuple[str, str], ...]:
        return tuple((g.object_id, g.held_by) for g in self.groups if g.held_by)

    def held_group(self, tag: str) -> ItemGroup | None:
        for g in self.groups:
            if g.held_by == tag:
                return g
        return None


def initial_state(scenario: Scenario) -> SystemState:
    groups = tuple(
        ItemGroup(object_id=o.id, key=o.id, count=o.count, pose=o.pose)
        for o in scenario.objects
    )
    return SystemState(
        ee=scenario.physics.ee_start,
        f=0.0,
        pressure=0.0,
        tick=0,
        time=0.0,
        groups=groups,
        pressure_log=((0, 0.0),),
    )


def grasp_frame_pose(state: SystemState, grasp: GraspType) -> Pose:
    """Pose of a grasp frame: the end-effector plus the fixed offset."""
    return state.ee.offset(grasp.offset)


def clamp_ee(x: float, y: float, z: float, scenario: Scenario) -> tuple[float, float, float]:
    """Workspace clamp, with the z floor raised so grasp frames clear the table."""
    ws = scenario.workspace
    cx = min(max(x, ws.lo[0]), ws.hi[0])
    cy = min(max(y, ws.lo[1]), ws.hi[1])
    cz = min(max(z, scenario.ee_z_min), ws.hi[2])
    return cx, cy, cz


def ee_after(ee: Pose, a: tuple[float, float, float], scenario: Scenario) -> Pose:
    """Hypothetical end-effector pose one tick after commanding velocity ``a``."""
    dt = scenario.physics.dt
    return Pose(*clamp_ee(ee.x + a[0] * dt, ee.y + a[1] * dt, ee.z + a[2] * dt, scenario))


def ee_after_batch(ee: Pose, actions: np.ndarray, scenario: Scenario) -> np.ndarray:
    """Vectorized ``ee_after`` for an (n, 3) array of candidate velocities."""
    dt = scenario.physics.dt
    ws = scenario.workspace
    nxt = np.array([ee.x, ee.y, ee.z]) + actions * dt
    lo = np.array([ws.lo[0], ws.lo[1], scenario.ee_z_min])
    hi = np.array(ws.hi)
    return np.clip(nxt, lo, hi)


def integrate_gripper_channels(state: SystemState, df: float, dp: float, scenario: Scenario) -> SystemState:
    """Additive force/pressure update with saturation at the hardware limits."""
    gp = scenario.gripper
    f = min(max(state.f + df, 0.0), gp.f_max)
    p = min(max(state.pressure + dp, gp.p_min), gp.p_max)
    return replace(state, f=f, pressure=p)


def resting_height(pose: Pose, scenario: Scenario) -> float:
    """Height a free item settles at for its xy position."""
    if scenario.bin_region.contains_xy(pose):
        return scenario.bin_region.lo[2]
    return 0.0


def step(
    state: SystemState,
    a: tuple[float, float, float],
    df: float,
    dp: float,
    scenario: Scenario,
) -> SystemState:
    """One transition of the world under blended velocity ``a`` and channel
    increments. Pure and deterministic; attach/detach decisions live in the
    grasping module and run after this.
    """
    ax, ay, az = (float(v) for v in a)
    if not all(map(math.isfinite, (ax, ay, az))):
        raise ValueError("velocity command has non-finite components")
    phys = scenario.physics
    n = math.sqrt(ax * ax + ay * ay + az * az)
    if n > phys.v_max:
        s = phys.v_max / n
        ax, ay, az = ax * s, ay * s, az * s
    dt = phys.dt

    ee = Pose(*clamp_ee(state.ee.x + ax * dt, state.ee.y + ay * dt, state.ee.z + az * dt, scenario))

    gp = scenario.gripper
    f = min(max(state.f + float(df), 0.0), gp.f_max)
    pressure = min(max(state.pressure + float(dp), gp.p_min), gp.p_max)

    tick = state.tick + 1
    frames = {g.tag: ee.offset(g.offset) for g in gp.grasp_types}

    groups = []
    for grp in state.groups:
        if grp.held_by is not None:
            frame = frames[grp.held_by]
            groups.append(replace(grp, pose=frame.offset(grp.hold_offset), vz=0.0))
        else:
            floor = resting_height(grp.pose, scenario)
            if grp.pose.z > floor:
                vz = grp.vz - phys.gravity * dt
                z = grp.pose.z + vz * dt
                if z <= floor:
                    z, vz = floor, 0.0
                groups.append(replace(grp, pose=Pose(grp.pose.x, grp.pose.y, z), vz=vz))
            elif grp.vz != 0.0:
                groups.append(replace(grp, vz=0.0))
            else:
                groups.append(grp)

    plog = state.pressure_log
    if pressure != plog[-1][1]:
        plog = plog + ((tick, pressure),)
    # Trim entries that can no longer influence any delayed lookup.
    horizon = tick - delay_ticks(gp.tau_sw, dt)
    while len(plog) >= 2 and plog[1][0] <= horizon:
        plog = plog[1:]

    return SystemState(
        ee=ee,
        f=f,
        pressure=pressure,
        tick=tick,
        time=tick * dt,
        groups=tuple(groups),
        pressure_log=plog,
    )


def effective_pressure_now(state: SystemState, scenario: Scenario) -> float:
    """Pressure the pads physically see this tick (delayed command)."""
    cutoff = state.tick - delay_ticks(scenario.gripper.tau_sw, scenario.physics.dt)
    value = state.pressure_log[0][1]
    for t_cmd, p_cmd in state.pressure_log:
        if t_cmd <= cutoff:
            value = p_cmd
        else:
            break
    return value


def intent_pose(state: SystemState, object_id: str, scenario: Scenario) -> Pose:
    """Representative pose of an object for inference and assistance.

    Objects can be split across groups; the operator's next grasp plausibly
    targets the largest loose batch still outside the bin, falling back to
    binned and then held groups.
    """
    best = None
    for g in state.groups:
        if g.object_id != object_id:
            continue
        rank = (
            g.held_by is not None,
            scenario.bin_region.contains_xy(g.pose),
            -g.count,
            g.key,
        )
        if best is None or rank < best[0]:
            best = (rank, g)
    if best is None:
        raise KeyError(f"no groups for object {object_id!r}")
    return best[1].pose


def group_resting_in_bin(grp: ItemGroup, scenario: Scenario) -> bool:
    return (
        grp.held_by is None
        and grp.vz == 0.0
        and grp.pose.z <= resting_height(grp.pose, scenario)
        and scenario.bin_region.contains(grp.pose)
    )


def object_in_bin(state: SystemState, object_id: str, scenario: Scenario) -> bool:
    """True when every item of the object rests inside the bin."""
    groups = [g for g in state.groups if g.object_id == object_id]
    return all(group_resting_in_bin(g, scenario) for g in groups)


def all_objects_in_bin(state: SystemState, scenario: Scenario) -> bool:
    return all(group_resting_in_bin(g, scenario) for g in state.groups)
