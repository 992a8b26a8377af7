"""Attach/detach decision rules for both grasp modalities.

Rigid pinches hold one item through Coulomb friction at two finger contacts
(2*mu*f >= m*g, ties hold). Adhesive pads hold a batch of items while the
delayed-pressure capacity covers the held weight. Decisions depend only on
the current state and the delayed pressure, never on event history.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import adhesion
from .scenario import Pose, Scenario
from .world import (
    ItemGroup,
    SystemState,
    effective_pressure_now,
    grasp_frame_pose,
)

RIGID_ATTACH = "rigid_attach"
RIGID_DETACH = "rigid_detach"
SOFT_ATTACH = "soft_attach"
SOFT_DETACH = "soft_detach"
DROP = "drop"


@dataclass(frozen=True)
class GraspEvent:
    kind: str
    object_id: str
    grasp_tag: str
    items_k: int
    time: float
    group_key: str


def _pinch_holds(mu: float, f: float, mass: float, gravity: float) -> bool:
    return 2.0 * mu * f >= mass * gravity


def _max_soft_items(
    group: ItemGroup, p_eff: float, scenario: Scenario
) -> int:
    """Largest batch the pad can pick from this group right now.

    Bounded by the pile size, by how many items fit under the pad, and by the
    capacity-vs-weight ratio (capacity grows like sqrt(k), weight like k).
    """
    obj = scenario.object_by_id(group.object_id)
    w_item = obj.item_mass * scenario.physics.gravity
    k_fit = adhesion.max_items_under_pad(obj.contact_radius, scenario.gripper)
    # Capacity grows like sqrt(k) while weight grows like k, so feasibility is
    # monotone; take the largest k the hold rule accepts (same expression the
    # detach check uses, so a fresh attach can never detach on the next tick
    # without a state change).
    for k in range(min(group.count, k_fit), 0, -1):
        capacity = adhesion.group_capacity(
            p_eff, obj.contact_radius, obj.adhesion_energy, k, scenario.adhesion, scenario.gripper
        )
        if capacity >= k * w_item:
            return k
    return 0


def try_rigid_attach(state: SystemState, scenario: Scenario) -> GraspEvent | None:
    """Pinch the nearest reachable item, if the fingers can hold it."""
    gp = scenario.gripper
    if state.held_group(gp.rigid.tag) is not None:
        return None
    if state.f <= 0.0:
        return None
    frame = grasp_frame_pose(state, gp.rigid)
    held_objects = {g.object_id for g in state.groups if g.held_by}
    best = None
    for grp in state.groups:
        if grp.held_by is not None or grp.object_id in held_objects:
            continue
        obj = scenario.object_by_id(grp.object_id)
        if obj.width > gp.stroke:
            continue
        if not _pinch_holds(obj.friction_mu, state.f, obj.item_mass, scenario.physics.gravity):
            continue
        if abs(frame.z - grp.pose.z) > gp.contact_tol:
            continue
        d = frame.dist_xy(grp.pose)
        if d > gp.capture_radius:
            continue
        rank = (d, grp.key)
        if best is None or rank < best[0]:
            best = (rank, grp)
    if best is None:
        return None
    grp = best[1]
    return GraspEvent(RIGID_ATTACH, grp.object_id, gp.rigid.tag, 1, state.time, grp.key)


def try_soft_attach(state: SystemState, pad_tag: str, scenario: Scenario) -> GraspEvent | None:
    """Adhere to the nearest batch under this pad; needs vacuum at the pad."""
    gp = scenario.gripper
    pad = gp.grasp(pad_tag)
    if pad.is_rigid:
        raise ValueError(f"{pad_tag!r} is not an adhesive pad")
    if state.held_group(pad_tag) is not None:
        return None
    p_eff = effective_pressure_now(state, scenario)
    if p_eff >= 0.0:
        return None
    frame = grasp_frame_pose(state, pad)
    held_objects = {g.object_id for g in state.groups if g.held_by}
    best = None
    for grp in state.groups:
        if grp.held_by is not None or grp.object_id in held_objects:
            continue
        if abs(frame.z - grp.pose.z) > gp.contact_tol:
            continue
        d = frame.dist_xy(grp.pose)
        if d > gp.pad_radius:
            continue
        k = _max_soft_items(grp, p_eff, scenario)
        if k < 1:
            continue
        rank = (d, grp.key)
        if best is None or rank < best[0]:
            best = (rank, grp, k)
    if best is None:
        return None
    _, grp, k = best
    return GraspEvent(SOFT_ATTACH, grp.object_id, pad_tag, k, state.time, grp.key)


def check_detach(state: SystemState, scenario: Scenario) -> list[GraspEvent]:
    """Hold checks for every attachment; run once per step after the channels
    integrate. A detach over the bin is a release; anywhere else it is a drop.
    """
    gp = scenario.gripper
    p_eff = effective_pressure_now(state, scenario)
    events = []
    for grp in state.groups:
        if grp.held_by is None:
            continue
        obj = scenario.object_by_id(grp.object_id)
        if grp.held_by == gp.rigid.tag:
            holds = _pinch_holds(
                obj.friction_mu, state.f, obj.item_mass * grp.count, scenario.physics.gravity
            )
            kind = RIGID_DETACH
        else:
            capacity = adhesion.group_capacity(
                p_eff,
                obj.contact_radius,
                obj.adhesion_energy,
                grp.count,
                scenario.adhesion,
                scenario.gripper,
            )
            holds = capacity >= obj.item_mass * grp.count * scenario.physics.gravity
            kind = SOFT_DETACH
        if not holds:
            if not scenario.bin_region.contains_xy(grp.pose):
                kind = DROP
            events.append(GraspEvent(kind, grp.object_id, grp.held_by, grp.count, state.time, grp.key))
    return events


def _apply_detach(groups: list[ItemGroup], event: GraspEvent) -> None:
    for i, grp in enumerate(groups):
        if grp.key == event.group_key:
            groups[i] = replace(grp, held_by=None, hold_offset=None, vz=0.0)
            return


def _apply_attach(
    groups: list[ItemGroup], event: GraspEvent, state: SystemState, scenario: Scenario
) -> None:
    frame = grasp_frame_pose(state, scenario.gripper.grasp(event.grasp_tag))
    for i, grp in enumerate(groups):
        if grp.key != event.group_key:
            continue
        offset = Pose(grp.pose.x - frame.x, grp.pose.y - frame.y, grp.pose.z - frame.z)
        if event.items_k >= grp.count:
            groups[i] = replace(grp, held_by=event.grasp_tag, hold_offset=offset, vz=0.0)
        else:
            taken = ItemGroup(
                object_id=grp.object_id,
                key=f"{grp.key}+{state.tick}",
                count=event.items_k,
                pose=grp.pose,
                held_by=event.grasp_tag,
                hold_offset=offset,
            )
            groups[i] = replace(grp, count=grp.count - event.items_k)
            groups.append(taken)
        return


def resolve(state: SystemState, scenario: Scenario) -> tuple[SystemState, list[GraspEvent]]:
    """Run detach checks then attach attempts, applying each to the state.

    Groups detached this tick are excluded from re-attachment until the next
    tick, which is when they physically start to fall away.
    """
    events = check_detach(state, scenario)
    groups = list(state.groups)
    dropped_keys = set()
    for ev in events:
        _apply_detach(groups, ev)
        dropped_keys.add(ev.group_key)
    state = replace(state, groups=tuple(groups))

    def attachable(ev: GraspEvent | None) -> bool:
        return ev is not None and ev.group_key not in dropped_keys

    ev = try_rigid_attach(state, scenario)
    if attachable(ev):
        groups = list(state.groups)
        _apply_attach(groups, ev, state, scenario)
        state = replace(state, groups=tuple(groups))
        events.append(ev)
    for pad in scenario.gripper.pads:
        ev = try_soft_attach(state, pad.tag, scenario)
        if attachable(ev):
            groups = list(state.groups)
            _apply_attach(groups, ev, state, scenario)
            state = replace(state, groups=tuple(groups))
            events.append(ev)
    return state, events
