"""Scripted and synthetic operators for headless benchmarking.

``SyntheticOperator`` is a noisily-rational stand-in for a human: arm motion
is sampled from a softmax over a finite direction set (the same quadratic
preference the inference assumes), and force/pressure ramps follow the
inflate -> contact -> evacuate -> lift -> transport -> release cycle.
``ScriptOperator`` replays a timed input script verbatim.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .scenario import Pose, Scenario
from .world import (
    OperatorInput,
    SystemState,
    ZERO_INPUT,
    ee_after_batch,
    grasp_frame_pose,
    intent_pose,
    object_in_bin,
)


def _direction_set() -> np.ndarray:
    """The 26 unit directions of the 3x3x3 sign lattice, plus the null action."""
    dirs = [
        np.array(v, dtype=float) / np.linalg.norm(v)
        for v in itertools.product((-1, 0, 1), repeat=3)
        if v != (0, 0, 0)
    ]
    dirs.append(np.zeros(3))
    return np.stack(dirs)


DIRECTIONS = _direction_set()
DIRECTIONS.flags.writeable = False


def boltzmann_action(
    state: SystemState,
    ee_target: Pose,
    beta: float,
    rng: np.random.Generator,
    scenario: Scenario,
) -> tuple[float, float, float]:
    """Sample an arm velocity from the softmax over the discrete action set.

    Logits are the squared-distance improvement toward ``ee_target`` after a
    hypothetical (workspace-clamped) step, scaled by ``beta``.
    """
    actions = DIRECTIONS * scenario.physics.v_max
    nxt = ee_after_batch(state.ee, actions, scenario)
    tgt = np.array(ee_target.as_tuple())
    here = np.array([state.ee.x, state.ee.y, state.ee.z])
    d_now = float(((tgt - here) ** 2).sum())
    d_next = ((tgt - nxt) ** 2).sum(axis=1)
    logits = beta * (d_now - d_next)
    logits -= logits.max()
    p = np.exp(logits)
    p /= p.sum()
    i = int(rng.choice(len(actions), p=p))
    return (float(actions[i, 0]), float(actions[i, 1]), float(actions[i, 2]))


def greedy_action(
    state: SystemState, ee_target: Pose, scenario: Scenario
) -> tuple[float, float, float]:
    """Deterministic precise motion: head straight at the target, landing on it
    exactly once within one step's reach."""
    dt = scenario.physics.dt
    v = (
        (ee_target.x - state.ee.x) / dt,
        (ee_target.y - state.ee.y) / dt,
        (ee_target.z - state.ee.z) / dt,
    )
    n = math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
    if n <= scenario.physics.v_max or n == 0.0:
        return v
    s = scenario.physics.v_max / n
    return (v[0] * s, v[1] * s, v[2] * s)


# Operator phases
_APPROACH = "approach"
_RAMP = "ramp"
_LIFT = "lift"
_CARRY = "carry"
_RELEASE = "release"
_DONE = "done"


@dataclass
class _Plan:
    object_id: str
    grasp_tag: str


class SyntheticOperator:
    """Noisily-optimal pick-and-place operator.

    ``beta`` is the softmax rationality; ``beta=None`` selects the precise
    deterministic controller instead (useful for regression fixtures). The
    operator works through its targets in order, gives up on an object after
    ``patience_s`` of simulated time, and reports ``finished`` once every
    target is binned or abandoned.
    """

    def __init__(
        self,
        scenario: Scenario,
        targets: list[tuple[str, str]] | None = None,
        beta: float | None = None,
        seed: int = 0,
        patience_s: float = 90.0,
        carry_height: float = 0.18,
        df_step: float | None = None,
        dp_step: float | None = None,
        bin_margin: float = 0.06,
        align_frac: float = 0.9,
        settle_ticks: int = 1,
    ) -> None:
        self.scenario = scenario
        self.beta = beta
        self.patience_s = patience_s
        self.carry_height = carry_height
        self.df_step = df_step
        self.dp_step = dp_step
        self.bin_margin = bin_margin
        self.align_frac = align_frac
        self.settle_ticks = settle_ticks
        self._explicit_targets = targets
        self.begin(scenario, seed)

    def begin(self, scenario: Scenario, seed: int) -> None:
        self.scenario = scenario
        self.rng = np.random.default_rng(seed)
        self.plans = [_Plan(o, g) for o, g in self._targets(scenario)]
        self._streak = 0
        self.phase = _APPROACH
        self.target_started = 0
        self.finished = not self.plans

    def _targets(self, scenario: Scenario) -> list[tuple[str, str]]:
        if self._explicit_targets is not None:
            return list(self._explicit_targets)
        pads = scenario.gripper.pads
        out = []
        for o in scenario.objects:
            tag = o.preferred_grasp or pads[0].tag
            out.append((o.id, tag))
        return out

    # -- helpers ----------------------------------------------------------

    def _grasp_align_tol(self, tag: str) -> float:
        gp = self.scenario.gripper
        if tag == gp.rigid.tag:
            return self.align_frac * gp.capture_radius
        return self.align_frac * gp.pad_radius

    def _move(self, state: SystemState, ee_target: Pose) -> tuple[float, float, float]:
        if self.beta is None:
            return greedy_action(state, ee_target, self.scenario)
        return boltzmann_action(state, ee_target, self.beta, self.rng, self.scenario)

    def _advance(self, phase: str) -> None:
        self.phase = phase

    def _next_plan(self, state: SystemState) -> None:
        self.plans.pop(0)
        self.target_started = state.tick
        self._advance(_APPROACH)
        if not self.plans:
            self.phase = _DONE
            self.finished = True

    # -- main policy ------------------------------------------------------

    def act(self, state: SystemState) -> OperatorInput:
        sc = self.scenario
        if self.finished or not self.plans:
            return ZERO_INPUT
        plan = self.plans[0]

        if object_in_bin(state, plan.object_id, sc):
            self._next_plan(state)
            if self.finished:
                return ZERO_INPUT
            plan = self.plans[0]

        # Give up on stubborn objects so an episode always terminates.
        patience_ticks = int(round(self.patience_s / sc.physics.dt))
        if state.tick - self.target_started > patience_ticks and self.phase in (
            _APPROACH,
            _RAMP,
        ):
            self._next_plan(state)
            if self.finished:
                return ZERO_INPUT
            plan = self.plans[0]

        grasp = sc.gripper.grasp(plan.grasp_tag)
        held = state.held_group(plan.grasp_tag)
        v_max = sc.physics.v_max

        if self.phase == _APPROACH:
            if held is not None:
                # Something stuck to the intended pad on the way; shed it.
                self._advance(_RELEASE)
                return self._release_input(state, plan)
            target = intent_pose(state, plan.object_id, sc)
            ee_target = Pose(
                target.x - grasp.offset.x,
                target.y - grasp.offset.y,
                max(target.z - grasp.offset.z, sc.ee_z_min),
            )
            frame = grasp_frame_pose(state, grasp)
            aligned = (
                frame.dist_xy(target) <= self._grasp_align_tol(plan.grasp_tag)
                and abs(frame.z - target.z) <= sc.gripper.contact_tol
            )
            # Hold the pose a few ticks before working the channel, like a
            # teleoperator confirming the pad is planted.
            self._streak = self._streak + 1 if aligned else 0
            if aligned and self._streak >= self.settle_ticks:
                self._advance(_RAMP)
                return self._ramp_input(state, plan)
            if aligned:
                return OperatorInput.make((0.0, 0.0, 0.0))
            # Vent a leftover vacuum while maneuvering so nothing sticks to a
            # pad that merely grazes an object en route.
            dp = self._increment(-state.pressure, self.dp_step) if state.pressure < 0.0 else 0.0
            return OperatorInput.make(self._move(state, ee_target), df=0.0, dp=dp, v_max=v_max)

        if self.phase == _RAMP:
            if held is not None:
                if held.object_id == plan.object_id:
                    self._advance(_LIFT)
                    return self._lift_input(state)
                self._advance(_RELEASE)
                return self._release_input(state, plan)
            frame = grasp_frame_pose(state, grasp)
            target = intent_pose(state, plan.object_id, sc)
            if frame.dist_xy(target) > self._grasp_align_tol(plan.grasp_tag):
                self._advance(_APPROACH)
                return self.act(state)
            return self._ramp_input(state, plan)

        if self.phase == _LIFT:
            if held is None:
                self._advance(_APPROACH)
                return self.act(state)
            if abs(state.ee.z - self.carry_height) <= 0.02:
                self._advance(_CARRY)
                return self.act(state)
            return self._lift_input(state)

        if self.phase == _CARRY:
            if held is None:
                self._advance(_APPROACH)
                return self.act(state)
            bx, by = sc.bin_region.center_xy()
            ee_target = Pose(bx - grasp.offset.x, by - grasp.offset.y, self.carry_height)
            b = sc.bin_region
            m = self.bin_margin
            over_bin = (
                b.lo[0] + m <= held.pose.x <= b.hi[0] - m
                and b.lo[1] + m <= held.pose.y <= b.hi[1] - m
            )
            if over_bin:
                self._advance(_RELEASE)
                return self._release_input(state, plan)
            return OperatorInput.make(self._move(state, ee_target), v_max=v_max)

        if self.phase == _RELEASE:
            if held is None:
                # Fully released; move on, or start the pile's next trip with
                # a fresh patience window.
                if object_in_bin(state, plan.object_id, sc):
                    self._next_plan(state)
                else:
                    self.target_started = state.tick
                    self._advance(_APPROACH)
                return ZERO_INPUT
            return self._release_input(state, plan)

        return ZERO_INPUT

    def _pinch_force(self, plan: _Plan) -> float:
        sc = self.scenario
        obj = sc.object_by_id(plan.object_id)
        return min(
            sc.gripper.f_max,
            1.25 * obj.item_mass * sc.physics.gravity / (2.0 * obj.friction_mu),
        )

    def _increment(self, delta: float, cap: float | None) -> float:
        if cap is not None and abs(delta) > cap:
            return cap if delta > 0 else -cap
        return delta

    def _ramp_input(self, state: SystemState, plan: _Plan) -> OperatorInput:
        sc = self.scenario
        if plan.grasp_tag == sc.gripper.rigid.tag:
            df = self._increment(self._pinch_force(plan) - state.f, self.df_step)
            return OperatorInput.make((0.0, 0.0, 0.0), df=df)
        dp = self._increment(sc.gripper.p_min - state.pressure, self.dp_step)
        return OperatorInput.make((0.0, 0.0, 0.0), dp=dp)

    def _lift_input(self, state: SystemState) -> OperatorInput:
        sc = self.scenario
        tgt = Pose(state.ee.x, state.ee.y, self.carry_height)
        return OperatorInput.make(self._move(state, tgt), v_max=sc.physics.v_max)

    def _release_input(self, state: SystemState, plan: _Plan) -> OperatorInput:
        sc = self.scenario
        if plan.grasp_tag == sc.gripper.rigid.tag:
            df = self._increment(-state.f, self.df_step)
            return OperatorInput.make((0.0, 0.0, 0.0), df=df)
        dp = self._increment(sc.gripper.p_max - state.pressure, self.dp_step)
        return OperatorInput.make((0.0, 0.0, 0.0), dp=dp)


class ScriptOperator:
    """Replays a timed input script; zero input between entries.

    Entries are ``{"t": seconds, "aH": [x, y, z], "df": N, "dP": psi}`` with
    nondecreasing timestamps; an entry lands on the tick nearest t / dt and
    the last entry for a tick wins.
    """

    def __init__(self, entries: list[dict], scenario: Scenario) -> None:
        self.by_tick: dict[int, OperatorInput] = {}
        last_t = None
        for e in entries:
            t = float(e["t"])
            if last_t is not None and t < last_t:
                raise ValueError("script timestamps must be nondecreasing")
            last_t = t
            tick = int(round(t / scenario.physics.dt))
            self.by_tick[tick] = OperatorInput.make(
                tuple(float(v) for v in e.get("aH", (0.0, 0.0, 0.0))),
                df=float(e.get("df", 0.0)),
                dp=float(e.get("dP", 0.0)),
                v_max=scenario.physics.v_max,
            )
        self.last_tick = max(self.by_tick) if self.by_tick else -1
        # Let released items settle before calling the episode over.
        self.grace_ticks = int(math.ceil(1.0 / scenario.physics.dt))
        self.finished = not self.by_tick

    def begin(self, scenario: Scenario, seed: int) -> None:
        self.finished = not self.by_tick

    def act(self, state: SystemState) -> OperatorInput:
        if state.tick >= self.last_tick + self.grace_ticks:
            self.finished = True
        return self.by_tick.get(state.tick, ZERO_INPUT)


class FrameOperator:
    """Feeds a prerecorded list of per-tick inputs, one per tick, then zeros.

    This is the replay primitive: tick k consumes entry k.
    """

    def __init__(self, inputs: list[OperatorInput]) -> None:
        self.inputs = list(inputs)
        self.finished = not self.inputs

    def begin(self, scenario: Scenario, seed: int) -> None:
        self.finished = not self.inputs

    def act(self, state: SystemState) -> OperatorInput:
        if state.tick < len(self.inputs):
            if state.tick == len(self.inputs) - 1:
                self.finished = True
            return self.inputs[state.tick]
        self.finished = True
        return ZERO_INPUT


def load_script(path: str, scenario: Scenario) -> ScriptOperator:
    with open(path, "r", encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise ValueError("script file must be a JSON list of {t, aH, df, dP}")
    return ScriptOperator(entries, scenario)
