"""Joint belief over (object, grasp type) updated from arm commands.

The operator is modeled as noisily rational: commands that move a grasp frame
toward an object raise the posterior on that pairing. Updates run in log
space with max-subtraction; an optional probability floor keeps a momentary
wrong command from permanently zeroing the true intent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import GraspType, Scenario
from .world import SystemState, ee_after, grasp_frame_pose, intent_pose


@dataclass(frozen=True)
class Belief:
    """Normalized probability table over object ids x grasp tags."""

    object_ids: tuple[str, ...]
    grasp_tags: tuple[str, ...]
    log_p: np.ndarray  # shape (n_objects, n_grasps)

    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_p)

    def prob(self, object_id: str, grasp_tag: str) -> float:
        i = self.object_ids.index(object_id)
        j = self.grasp_tags.index(grasp_tag)
        return float(np.exp(self.log_p[i, j]))

    def as_flat_dict(self) -> dict[str, float]:
        p = self.probabilities()
        return {
            f"{oid}/{tag}": float(p[i, j])
            for i, oid in enumerate(self.object_ids)
            for j, tag in enumerate(self.grasp_tags)
        }


def _normalized(log_p: np.ndarray) -> np.ndarray:
    m = float(np.max(log_p))
    if not np.isfinite(m):
        raise ArithmeticError("belief collapsed: no finite posterior mass")
    z = m + np.log(np.sum(np.exp(log_p - m)))
    out = log_p - z
    out.flags.writeable = False
    return out


def prior_belief(scenario: Scenario) -> Belief:
    """Initial belief: scenario prior if given, else uniform over the support."""
    oids = tuple(o.id for o in scenario.objects)
    tags = tuple(g.tag for g in scenario.gripper.grasp_types)
    table = np.ones((len(oids), len(tags)))
    if scenario.prior is not None:
        table = np.full((len(oids), len(tags)), 0.0)
        for key, w in scenario.prior.items():
            oid, _, tag = key.partition("/")
            table[oids.index(oid), tags.index(tag)] = w
    with np.errstate(divide="ignore"):
        log_p = np.log(table / table.sum())
    return Belief(oids, tags, _normalized(log_p))


def likelihood_logit(
    state: SystemState,
    a_h: tuple[float, float, float],
    object_pose,
    grasp: GraspType,
    beta: float,
    scenario: Scenario,
) -> float:
    """Log-likelihood (up to a constant) of command ``a_h`` under intent
    (object, grasp): squared distance gained by the hypothetical next pose.
    """
    s_g = grasp_frame_pose(state, grasp)
    s_g_next = ee_after(state.ee, a_h, scenario).offset(grasp.offset)
    return beta * (object_pose.dist2(s_g) - object_pose.dist2(s_g_next))


def likelihood_logits(
    belief: Belief,
    state: SystemState,
    a_h: tuple[float, float, float],
    beta: float,
    scenario: Scenario,
) -> np.ndarray:
    """Vectorized logits for the whole support, matching ``likelihood_logit``."""
    obj = np.array(
        [intent_pose(state, oid, scenario).as_tuple() for oid in belief.object_ids]
    )  # (n_o, 3)
    offsets = np.array(
        [scenario.gripper.grasp(tag).offset.as_tuple() for tag in belief.grasp_tags]
    )  # (n_g, 3)
    ee = np.array([state.ee.x, state.ee.y, state.ee.z])
    ee_next = ee_after(state.ee, a_h, scenario)
    frames = ee + offsets
    frames_next = np.array([ee_next.x, ee_next.y, ee_next.z]) + offsets
    d_now = ((obj[:, None, :] - frames[None, :, :]) ** 2).sum(axis=2)
    d_next = ((obj[:, None, :] - frames_next[None, :, :]) ** 2).sum(axis=2)
    return beta * (d_now - d_next)


def update(
    belief: Belief,
    state: SystemState,
    a_h: tuple[float, float, float],
    scenario: Scenario,
    beta: float | None = None,
    floor: float | None = None,
) -> Belief:
    """One recursive Bayes step from a single arm command."""
    if beta is None:
        beta = scenario.assist.beta
    if floor is None:
        floor = scenario.assist.belief_floor
    logits = likelihood_logits(belief, state, a_h, beta, scenario)
    log_p = _normalized(belief.log_p + logits)
    if floor > 0.0:
        p = np.maximum(np.exp(log_p), floor)
        log_p = _normalized(np.log(p / p.sum()))
    return Belief(belief.object_ids, belief.grasp_tags, log_p)


def map_estimate(belief: Belief) -> tuple[str, str]:
    """Argmax pair; exact ties break lexicographically on (object id, tag)."""
    p = belief.log_p
    best = None
    m = float(np.max(p))
    for i, oid in enumerate(belief.object_ids):
        for j, tag in enumerate(belief.grasp_tags):
            if p[i, j] == m and (best is None or (oid, tag) < best):
                best = (oid, tag)
    return best
