"""Episode orchestration: the fixed-step loop, tick-by-tick logging, the study
metrics, NDJSON log round-trip and exact replay.

Per tick: read the operator input, update the belief from the arm command,
compute the assistance action (shared mode), blend, step the world, then run
the grasp/detach checks. The same loop backs headless episodes and the live
socket service, which is what makes transport transparency structural rather
than tested-in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import grasping, inference, world
from .agents import FrameOperator
from .assist import assistance_action, blend
from .grasping import GraspEvent
from .inference import Belief
from .scenario import (
    Box,
    Pose,
    Scenario,
    scenario_from_json,
    scenario_hash,
    scenario_to_json,
)
from .world import ItemGroup, OperatorInput, SystemState

MODE_HUMAN = "human"
MODE_SHARED = "shared"

ZERO3 = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class TickRecord:
    tick: int
    time: float
    input: OperatorInput
    a_r: tuple[float, float, float]
    a: tuple[float, float, float]
    state: SystemState
    belief: np.ndarray  # probabilities snapshot, shape (n_objects, n_grasps)
    events: tuple[GraspEvent, ...]


@dataclass
class EpisodeLog:
    scenario: Scenario
    mode: str
    seed: int
    alpha: float
    beta: float
    records: list[TickRecord] = field(default_factory=list)
    terminal: str | None = None

    @property
    def final_state(self) -> SystemState:
        return self.records[-1].state if self.records else world.initial_state(self.scenario)


@dataclass(frozen=True)
class MetricsReport:
    success_rate: float  # percent of objects fully delivered to the bin
    grasp_time: float  # over-table seconds per object
    grasp_distance: float  # over-table end-effector path length per object
    input_time: float  # over-table seconds with any operator input, per object
    per_object: dict[str, bool]
    sim_time: float
    ticks: int
    terminal: str | None

    def as_json(self) -> dict:
        return {
            "success_rate": self.success_rate,
            "grasp_time": self.grasp_time,
            "grasp_distance": self.grasp_distance,
            "input_time": self.input_time,
            "per_object": dict(self.per_object),
            "sim_time": self.sim_time,
            "ticks": self.ticks,
            "terminal": self.terminal,
        }


class SessionLoop:
    """Single authority stepping one episode; both the headless runner and the
    socket service drive this object."""

    def __init__(self, scenario: Scenario, mode: str = MODE_SHARED, seed: int = 0) -> None:
        if mode not in (MODE_HUMAN, MODE_SHARED):
            raise ValueError(f"unknown mode {mode!r}")
        scenario.validate()
        self.scenario = scenario
        self.mode = mode
        self.seed = seed
        # Human mode pins full authority to the operator and disables the
        # autonomous action; the belief is still tracked for display/replay.
        self.alpha = 1.0 if mode == MODE_HUMAN else scenario.assist.alpha
        self.state = world.initial_state(scenario)
        self.belief = inference.prior_belief(scenario)
        self.log = EpisodeLog(
            scenario=scenario,
            mode=mode,
            seed=seed,
            alpha=self.alpha,
            beta=scenario.assist.beta,
        )
        self.terminal: str | None = None

    @property
    def tick_count(self) -> int:
        return self.state.tick

    def tick(self, op_input: OperatorInput) -> TickRecord:
        if self.terminal is not None:
            raise RuntimeError("episode already terminal")
        sc = self.scenario
        # The reaching model explains commands as closing on a grasp target;
        # while something is held the arm is transporting, which that model
        # misreads, so the belief only integrates commands between grasps.
        loaded = bool(self.state.attachments)
        if loaded:
            belief = self.belief
        else:
            belief = inference.update(self.belief, self.state, op_input.a_h, sc)
        if self.mode == MODE_SHARED and not loaded:
            a_r = assistance_action(belief, self.state, sc, op_input)
        else:
            # Assistance aligns the gripper for grasps; transporting a held
            # item is the operator's call, so the autonomous term idles.
            a_r = ZERO3
        a = blend(op_input.a_h, a_r, self.alpha, sc.physics.v_max)
        stepped = world.step(self.state, a, op_input.df, op_input.dp, sc)
        state, events = grasping.resolve(stepped, sc)
        if any(ev.kind in (grasping.SOFT_DETACH, grasping.RIGID_DETACH) for ev in events):
            belief = inference.prior_belief(sc)

        self.state = state
        self.belief = belief
        rec = TickRecord(
            tick=state.tick,
            time=state.time,
            input=op_input,
            a_r=a_r,
            a=a,
            state=state,
            belief=belief.probabilities(),
            events=tuple(events),
        )
        self.log.records.append(rec)

        if world.all_objects_in_bin(state, sc):
            self._finish("all_binned")
        elif state.tick >= sc.step_budget_ticks:
            self._finish("budget")
        return rec

    def _finish(self, reason: str) -> None:
        self.terminal = reason
        self.log.terminal = reason

    def metrics(self) -> MetricsReport:
        return compute_metrics(self.log)


def run_episode(
    scenario: Scenario,
    operator,
    mode: str = MODE_SHARED,
    seed: int = 0,
    max_ticks: int | None = None,
) -> EpisodeLog:
    """Run one episode to termination: everything binned, budget exhausted,
    the operator reporting done, or an explicit tick cap."""
    loop = SessionLoop(scenario, mode=mode, seed=seed)
    operator.begin(scenario, seed)
    while loop.terminal is None:
        loop.tick(operator.act(loop.state))
        if loop.terminal is not None:
            break
        if max_ticks is not None and loop.tick_count >= max_ticks:
            loop._finish("max_ticks")
        elif getattr(operator, "finished", False):
            loop._finish("operator_finished")
    return loop.log


def _table_region(scenario: Scenario) -> Box:
    if scenario.table_region is not None:
        return scenario.table_region
    return scenario.workspace


def compute_metrics(log: EpisodeLog) -> MetricsReport:
    """Study metrics over one episode log.

    Time, distance and input time only count ticks where the end-effector is
    over the configured table region; success demands the object's final
    resting position lie inside the bin box.
    """
    if not log.records:
        raise ValueError("empty episode log")
    sc = log.scenario
    region = _table_region(sc)
    dt = sc.physics.dt
    n = len(sc.objects)

    over_ticks = 0
    active_ticks = 0
    distance = 0.0
    prev = world.initial_state(sc).ee
    for rec in log.records:
        ee = rec.state.ee
        if region.contains_xy(ee):
            over_ticks += 1
            dx, dy, dz = ee.x - prev.x, ee.y - prev.y, ee.z - prev.z
            distance += (dx * dx + dy * dy + dz * dz) ** 0.5
            if rec.input.active:
                active_ticks += 1
        prev = ee

    final = log.final_state
    per_object = {o.id: world.object_in_bin(final, o.id, sc) for o in sc.objects}
    delivered = sum(per_object.values())
    return MetricsReport(
        success_rate=100.0 * delivered / n,
        grasp_time=dt * over_ticks / n,
        grasp_distance=distance / n,
        input_time=dt * active_ticks / n,
        per_object=per_object,
        sim_time=log.records[-1].time,
        ticks=len(log.records),
        terminal=log.terminal,
    )


# ---------------------------------------------------------------------------
# NDJSON round-trip and exact replay.


def _state_to_json(s: SystemState) -> dict:
    return {
        "ee": list(s.ee.as_tuple()),
        "f": s.f,
        "P": s.pressure,
        "tick": s.tick,
        "t": s.time,
        "groups": [
            {
                "object": g.object_id,
                "key": g.key,
                "count": g.count,
                "pose": list(g.pose.as_tuple()),
                "vz": g.vz,
                "held_by": g.held_by,
                "hold_offset": list(g.hold_offset.as_tuple()) if g.hold_offset else None,
            }
            for g in s.groups
        ],
        "plog": [list(e) for e in s.pressure_log],
    }


def _state_from_json(d: dict) -> SystemState:
    return SystemState(
        ee=Pose(*d["ee"]),
        f=d["f"],
        pressure=d["P"],
        tick=d["tick"],
        time=d["t"],
        groups=tuple(
            ItemGroup(
                object_id=g["object"],
                key=g["key"],
                count=g["count"],
                pose=Pose(*g["pose"]),
                vz=g["vz"],
                held_by=g["held_by"],
                hold_offset=Pose(*g["hold_offset"]) if g["hold_offset"] else None,
            )
            for g in d["groups"]
        ),
        pressure_log=tuple((int(t), float(p)) for t, p in d["plog"]),
    )


def _event_to_json(ev: GraspEvent) -> dict:
    return {
        "kind": ev.kind,
        "object": ev.object_id,
        "grasp": ev.grasp_tag,
        "k": ev.items_k,
        "t": ev.time,
        "group": ev.group_key,
    }


def _event_from_json(d: dict) -> GraspEvent:
    return GraspEvent(d["kind"], d["object"], d["grasp"], d["k"], d["t"], d["group"])


def record_to_json(rec: TickRecord, belief_support) -> dict:
    oids, tags = belief_support
    belief = {
        f"{oid}/{tag}": float(rec.belief[i, j])
        for i, oid in enumerate(oids)
        for j, tag in enumerate(tags)
    }
    return {
        "kind": "tick",
        "tick": rec.tick,
        "t": rec.time,
        "input": {
            "aH": list(rec.input.a_h),
            "df": rec.input.df,
            "dP": rec.input.dp,
            "active": rec.input.active,
        },
        "aR": list(rec.a_r),
        "a": list(rec.a),
        "belief": belief,
        "events": [_event_to_json(ev) for ev in rec.events],
        "state": _state_to_json(rec.state),
    }


def header_to_json(log: EpisodeLog) -> dict:
    return {
        "v": 1,
        "kind": "header",
        "mode": log.mode,
        "seed": log.seed,
        "alpha": log.alpha,
        "beta": log.beta,
        "scenario_hash": scenario_hash(log.scenario),
        "scenario": scenario_to_json(log.scenario),
    }


def write_log(log: EpisodeLog, path: str) -> None:
    sc = log.scenario
    support = (
        tuple(o.id for o in sc.objects),
        tuple(g.tag for g in sc.gripper.grasp_types),
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header_to_json(log)) + "\n")
        for rec in log.records:
            fh.write(json.dumps(record_to_json(rec, support)) + "\n")
        fh.write(json.dumps({"kind": "end", "terminal": log.terminal}) + "\n")


def read_log(path: str) -> EpisodeLog:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or lines[0].get("kind") != "header":
        raise ValueError("log file must start with a header record")
    head = lines[0]
    sc = scenario_from_json(head["scenario"])
    oids = tuple(o.id for o in sc.objects)
    tags = tuple(g.tag for g in sc.gripper.grasp_types)
    log = EpisodeLog(
        scenario=sc,
        mode=head["mode"],
        seed=head["seed"],
        alpha=head["alpha"],
        beta=head["beta"],
    )
    for d in lines[1:]:
        if d.get("kind") == "end":
            log.terminal = d.get("terminal")
            continue
        if d.get("kind") != "tick":
            continue
        belief = np.array(
            [[d["belief"][f"{oid}/{tag}"] for tag in tags] for oid in oids]
        )
        inp = d["input"]
        log.records.append(
            TickRecord(
                tick=d["tick"],
                time=d["t"],
                input=OperatorInput(
                    tuple(float(v) for v in inp["aH"]), inp["df"], inp["dP"], inp["active"]
                ),
                a_r=tuple(float(v) for v in d["aR"]),
                a=tuple(float(v) for v in d["a"]),
                state=_state_from_json(d["state"]),
                belief=belief,
                events=tuple(_event_from_json(e) for e in d["events"]),
            )
        )
    return log


def replay_log(log: EpisodeLog) -> tuple[EpisodeLog, list[str]]:
    """Re-simulate an episode from its input columns and diff every snapshot.

    Returns the re-simulated log and a list of mismatch descriptions; an empty
    list means the log reproduces exactly.
    """
    operator = FrameOperator([rec.input for rec in log.records])
    fresh = run_episode(
        log.scenario, operator, mode=log.mode, seed=log.seed, max_ticks=len(log.records)
    )
    problems: list[str] = []
    if len(fresh.records) != len(log.records):
        problems.append(f"tick count {len(fresh.records)} != {len(log.records)}")
    for old, new in zip(log.records, fresh.records):
        if new.state != old.state:
            problems.append(f"tick {old.tick}: state diverged")
        if new.a != old.a or new.a_r != old.a_r:
            problems.append(f"tick {old.tick}: blended action diverged")
        if not np.array_equal(new.belief, old.belief):
            problems.append(f"tick {old.tick}: belief diverged")
        if new.events != old.events:
            problems.append(f"tick {old.tick}: events diverged")
        if problems:
            break
    return fresh, problems
