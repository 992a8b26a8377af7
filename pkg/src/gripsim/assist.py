"""Autonomous assistance action and the linear arbitration with the human.

The raw assistance is the belief-weighted sum of displacements from each
grasp frame to each object; a gain turns it into a velocity. While the
operator is adjusting force or pressure with an idle stick and the belief is
confident, the assist instead servoes straight at the MAP pair so the pad
stays planted during the grasp (toggleable via scenario.assist.align_hold).
"""

from __future__ import annotations

import math

import numpy as np

from .inference import Belief, map_estimate
from .scenario import Scenario
from .world import OperatorInput, SystemState, grasp_frame_pose, intent_pose

Vec = tuple[float, float, float]


def clamp_norm(v: Vec, v_max: float) -> Vec:
    """Scale ``v`` down to norm ``v_max``; vectors already inside pass through
    unchanged (bit-exact)."""
    n = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if n <= v_max:
        return v
    s = v_max / n
    return (v[0] * s, v[1] * s, v[2] * s)


def assistance_raw(belief: Belief, state: SystemState, scenario: Scenario) -> Vec:
    """Belief-weighted mean displacement from grasp frames to objects."""
    obj = np.array([intent_pose(state, oid, scenario).as_tuple() for oid in belief.object_ids])
    offsets = np.array(
        [scenario.gripper.grasp(tag).offset.as_tuple() for tag in belief.grasp_tags]
    )
    frames = np.array([state.ee.x, state.ee.y, state.ee.z]) + offsets
    diff = obj[:, None, :] - frames[None, :, :]  # (n_o, n_g, 3)
    raw = np.einsum("og,ogv->v", belief.probabilities(), diff)
    return (float(raw[0]), float(raw[1]), float(raw[2]))


def assistance_action(
    belief: Belief,
    state: SystemState,
    scenario: Scenario,
    operator_input: OperatorInput | None = None,
) -> Vec:
    """Autonomous velocity: gain times the raw displacement, speed-clamped."""
    ap = scenario.assist
    raw = assistance_raw(belief, state, scenario)
    # + 0.0 canonicalizes -0.0 so logged actions compare bitwise across modes
    v = (ap.k_r * raw[0] + 0.0, ap.k_r * raw[1] + 0.0, ap.k_r * raw[2] + 0.0)

    if ap.align_hold and operator_input is not None:
        working_channels = operator_input.df != 0.0 or operator_input.dp != 0.0
        ah = operator_input.a_h
        stick_idle = math.sqrt(ah[0] ** 2 + ah[1] ** 2 + ah[2] ** 2) < 0.1 * scenario.physics.v_max
        if working_channels and stick_idle:
            oid, tag = map_estimate(belief)
            if belief.prob(oid, tag) > ap.align_hold_threshold:
                target = intent_pose(state, oid, scenario)
                frame = grasp_frame_pose(state, scenario.gripper.grasp(tag))
                v = (
                    ap.k_r * (target.x - frame.x),
                    ap.k_r * (target.y - frame.y),
                    ap.k_r * (target.z - frame.z),
                )

    return clamp_norm(v, scenario.physics.v_max)


def blend(a_h: Vec, a_r: Vec, alpha: float, v_max: float) -> Vec:
    """Convex combination of human and autonomous commands, then speed clamp.

    The endpoints return the corresponding input bit-exactly.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if alpha == 1.0:
        return clamp_norm(a_h, v_max)
    if alpha == 0.0:
        return clamp_norm(a_r, v_max)
    w = 1.0 - alpha
    mixed = (
        alpha * a_h[0] + w * a_r[0] + 0.0,
        alpha * a_h[1] + w * a_r[1] + 0.0,
        alpha * a_h[2] + w * a_r[2] + 0.0,
    )
    return clamp_norm(mixed, v_max)
