"""Scenario data model: objects, gripper geometry, physics and assistance knobs.

Everything is a plain frozen dataclass so scenarios and states are immutable
values. Units are meters / seconds / kilograms / newtons; pressure is psi.
The table plane sits at z = 0.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

RIGID = "rigid"


class ScenarioError(ValueError):
    """Raised when a scenario file or object violates its invariants."""


@dataclass(frozen=True)
class Pose:
    """Position in the workspace frame (orientation is out of scope)."""

    x: float
    y: float
    z: float

    def offset(self, other: "Pose") -> "Pose":
        return Pose(self.x + other.x, self.y + other.y, self.z + other.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def dist2(self, other: "Pose") -> float:
        dx = self.x - other.x
        dy = self.y - other.y
        dz = self.z - other.z
        return dx * dx + dy * dy + dz * dz

    def dist_xy(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def is_finite(self) -> bool:
        return all(map(math.isfinite, (self.x, self.y, self.z)))


@dataclass(frozen=True)
class Box:
    """Axis-aligned box, inclusive on both faces."""

    lo: tuple[float, float, float]
    hi: tuple[float, float, float]

    def contains(self, p: Pose) -> bool:
        return (
            self.lo[0] <= p.x <= self.hi[0]
            and self.lo[1] <= p.y <= self.hi[1]
            and self.lo[2] <= p.z <= self.hi[2]
        )

    def contains_xy(self, p: Pose) -> bool:
        return self.lo[0] <= p.x <= self.hi[0] and self.lo[1] <= p.y <= self.hi[1]

    def clamp(self, x: float, y: float, z: float) -> tuple[float, float, float]:
        return (
            min(max(x, self.lo[0]), self.hi[0]),
            min(max(y, self.lo[1]), self.hi[1]),
            min(max(z, self.lo[2]), self.hi[2]),
        )

    def center_xy(self) -> tuple[float, float]:
        return ((self.lo[0] + self.hi[0]) / 2.0, (self.lo[1] + self.hi[1]) / 2.0)


@dataclass(frozen=True)
class GraspType:
    """One way of holding an object: the pinch point or a single adhesive pad.

    ``offset`` is the fixed displacement of this grasp frame from the
    end-effector frame and stays constant over an episode.
    """

    tag: str
    offset: Pose

    @property
    def is_rigid(self) -> bool:
        return self.tag == RIGID


@dataclass(frozen=True)
class SceneObject:
    """An item (or pile of identical items) somewhere on the table.

    ``contact_radius`` is the nominal dimension of the surface the pad touches;
    ``width`` is the pinch span seen by the rigid fingers. Piles set
    ``count`` > 1 and interpret ``mass`` as the total, so the per-item mass is
    mass / count.
    """

    id: str
    pose: Pose
    mass: float
    contact_radius: float
    width: float
    adhesion_energy: float  # J/m^2, interface-specific
    friction_mu: float
    count: int = 1
    preferred_grasp: str | None = None  # synthetic-operator intent hint

    @property
    def item_mass(self) -> float:
        return self.mass / self.count

    def validate(self) -> None:
        if self.mass <= 0:
            raise ScenarioError(f"object {self.id}: mass must be > 0")
        if self.contact_radius <= 0:
            raise ScenarioError(f"object {self.id}: contact_radius must be > 0")
        if self.adhesion_energy <= 0:
            raise ScenarioError(f"object {self.id}: adhesion_energy must be > 0")
        if self.friction_mu <= 0:
            raise ScenarioError(f"object {self.id}: friction_mu must be > 0")
        if self.width <= 0:
            raise ScenarioError(f"object {self.id}: width must be > 0")
        if self.count < 1:
            raise ScenarioError(f"object {self.id}: count must be >= 1")
        if not self.pose.is_finite() or self.pose.z < 0:
            raise ScenarioError(f"object {self.id}: pose must be finite with z >= 0")


@dataclass(frozen=True)
class AdhesionParams:
    """Calibration of the pressure-tunable force-capacity law.

    The capacity law is a proportionality; ``k_cal`` turns it into newtons and
    is an explicit calibration choice, not a measured constant. Compliance
    follows C(P) = c0 * exp(c_p * (P - p_min)), which is positive and strictly
    increasing in P with only two parameters.
    """

    k_cal: float
    c0: float = 1.0e-4  # m/N at the strongest (most negative) pressure
    c_p: float = 1.0  # 1/psi

    def validate(self) -> None:
        if self.k_cal <= 0 or self.c0 <= 0 or self.c_p < 0:
            raise ScenarioError("adhesion: k_cal, c0 must be > 0 and c_p >= 0")


# Default calibration: 5 N capacity at full vacuum for a pad-filling contact
# with a 10 J/m^2 interface.
DEFAULT_K_CAL = 5.0 / math.sqrt(10.0 * 0.03**2 / 1.0e-4)


@dataclass(frozen=True)
class GripperParams:
    """Geometry and actuation limits of the combined rigid/adhesive gripper."""

    grasp_types: tuple[GraspType, ...]
    pad_radius: float = 0.03  # active adhesive area radius
    stroke: float = 0.08  # max pinch span
    f_max: float = 70.0  # max continuous pinch force
    p_min: float = -13.0
    p_max: float = 2.9
    tau_sw: float = 0.1  # pneumatic switching latency, s
    capture_radius: float = 0.02  # rigid pinch xy tolerance
    contact_tol: float = 0.01  # vertical contact tolerance, both modalities

    @property
    def rigid(self) -> GraspType:
        for g in self.grasp_types:
            if g.is_rigid:
                return g
        raise ScenarioError("gripper has no rigid grasp type")

    @property
    def pads(self) -> tuple[GraspType, ...]:
        return tuple(g for g in self.grasp_types if not g.is_rigid)

    def grasp(self, tag: str) -> GraspType:
        for g in self.grasp_types:
            if g.tag == tag:
                return g
        raise ScenarioError(f"unknown grasp type {tag!r}")

    def validate(self) -> None:
        tags = [g.tag for g in self.grasp_types]
        if len(set(tags)) != len(tags):
            raise ScenarioError("grasp type tags must be unique")
        if not self.pads:
            raise ScenarioError("at least one adhesive pad is required")
        _ = self.rigid
        if self.pad_radius <= 0 or self.stroke <= 0 or self.f_max <= 0:
            raise ScenarioError("pad_radius, stroke, f_max must be > 0")
        if self.p_min >= self.p_max:
            raise ScenarioError("p_min must be < p_max")
        if self.tau_sw < 0:
            raise ScenarioError("tau_sw must be >= 0")


@dataclass(frozen=True)
class PhysicsParams:
    gravity: float = 9.81
    dt: float = 0.05
    v_max: float = 0.25
    ee_start: Pose = Pose(0.4, 0.0, 0.25)
    step_budget_s: float | None = None  # None: 120 s per object

    def validate(self) -> None:
        if self.dt <= 0 or self.v_max <= 0 or self.gravity <= 0:
            raise ScenarioError("dt, v_max, gravity must be > 0")


@dataclass(frozen=True)
class AssistParams:
    """Arbitration and human-model knobs for the shared controller."""

    alpha: float = 0.4  # convex weight on the human command
    beta: float = 5.0  # rationality of the modeled operator
    k_r: float = 1.0  # gain turning the belief-weighted offset into a velocity
    belief_floor: float = 1e-6
    align_hold: bool = True  # servo to the MAP pair while channels are worked
    align_hold_threshold: float = 0.8

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ScenarioError("alpha must lie in [0, 1]")
        if self.beta < 0 or self.k_r < 0:
            raise ScenarioError("beta and k_r must be >= 0")
        if self.belief_floor < 0:
            raise ScenarioError("belief_floor must be >= 0")


@dataclass(frozen=True)
class Scenario:
    """Everything needed to run one episode deterministically."""

    name: str
    objects: tuple[SceneObject, ...]
    workspace: Box
    bin_region: Box
    gripper: GripperParams
    physics: PhysicsParams = PhysicsParams()
    assist: AssistParams = AssistParams()
    adhesion: AdhesionParams = AdhesionParams(k_cal=DEFAULT_K_CAL)
    table_region: Box | None = None  # xy region counted as "over the table"
    prior: dict[str, float] | None = None  # "objectId/graspTag" -> weight
    seed: int = 0

    @property
    def dt(self) -> float:
        return self.physics.dt

    @property
    def step_budget_ticks(self) -> int:
        budget_s = self.physics.step_budget_s
        if budget_s is None:
            budget_s = 120.0 * len(self.objects)
        return max(1, int(round(budget_s / self.physics.dt)))

    @property
    def ee_z_min(self) -> float:
        # Keep every grasp frame at least contact_tol above the table so
        # attached items can never be dragged through it.
        lowest = min(g.offset.z for g in self.gripper.grasp_types)
        return max(self.workspace.lo[2], self.gripper.contact_tol - min(lowest, 0.0))

    def object_by_id(self, object_id: str) -> SceneObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise ScenarioError(f"unknown object id {object_id!r}")

    def validate(self) -> None:
        self.gripper.validate()
        self.physics.validate()
        self.assist.validate()
        self.adhesion.validate()
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ScenarioError("object ids must be unique")
        if not self.objects:
            raise ScenarioError("scenario needs at least one object")
        for o in self.objects:
            o.validate()
            if not self.workspace.contains_xy(o.pose):
                raise ScenarioError(f"object {o.id} starts outside the workspace")
            if self.bin_region.contains_xy(o.pose):
                raise ScenarioError(f"object {o.id} starts inside the bin")
            if o.preferred_grasp is not None:
                self.gripper.grasp(o.preferred_grasp)
        if not self.workspace.contains(self.physics.ee_start):
            raise ScenarioError("ee_start lies outside the workspace")
        if self.prior is not None:
            tags = {g.tag for g in self.gripper.grasp_types}
            for key, w in self.prior.items():
                oid, _, tag = key.partition("/")
                if oid not in ids or tag not in tags:
                    raise ScenarioError(f"prior key {key!r} not in object x grasp support")
                if w < 0:
                    raise ScenarioError(f"prior weight for {key!r} must be >= 0")
            if sum(self.prior.values()) <= 0:
                raise ScenarioError("prior weights must not all be zero")


# ---------------------------------------------------------------------------
# JSON round-trip. Key names below are the on-disk schema; see README.


def _box_to_json(b: Box) -> dict:
    return {"min": list(b.lo), "max": list(b.hi)}


def _box_from_json(d: dict, what: str) -> Box:
    try:
        lo, hi = d["min"], d["max"]
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"{what}: expected {{min, max}}") from exc
    if len(lo) != 3 or len(hi) != 3 or any(l > h for l, h in zip(lo, hi)):
        raise ScenarioError(f"{what}: min/max must be 3-vectors with min <= max")
    return Box(tuple(float(v) for v in lo), tuple(float(v) for v in hi))


def scenario_to_json(sc: Scenario) -> dict:
    d = {
        "name": sc.name,
        "seed": sc.seed,
        "objects": [
            {
                "id": o.id,
                "pose": list(o.pose.as_tuple()),
                "mass": o.mass,
                "contact_radius": o.contact_radius,
                "width": o.width,
                "adhesion_energy": o.adhesion_energy,
                "friction_mu": o.friction_mu,
                "count": o.count,
                **({"grasp": o.preferred_grasp} if o.preferred_grasp else {}),
            }
            for o in sc.objects
        ],
        "workspace": _box_to_json(sc.workspace),
        "bin": _box_to_json(sc.bin_region),
        "gripper": {
            "grasp_types": [
                {"tag": g.tag, "offset": list(g.offset.as_tuple())}
                for g in sc.gripper.grasp_types
            ],
            "pad_radius": sc.gripper.pad_radius,
            "stroke": sc.gripper.stroke,
            "f_max": sc.gripper.f_max,
            "p_min": sc.gripper.p_min,
            "p_max": sc.gripper.p_max,
            "tau_sw": sc.gripper.tau_sw,
            "capture_radius": sc.gripper.capture_radius,
            "contact_tol": sc.gripper.contact_tol,
        },
        "physics": {
            "gravity": sc.physics.gravity,
            "dt": sc.physics.dt,
            "v_max": sc.physics.v_max,
            "ee_start": list(sc.physics.ee_start.as_tuple()),
            "step_budget_s": sc.physics.step_budget_s,
        },
        "assistance": {
            "alpha": sc.assist.alpha,
            "beta": sc.assist.beta,
            "k_r": sc.assist.k_r,
            "belief_floor": sc.assist.belief_floor,
            "align_hold": sc.assist.align_hold,
            "align_hold_threshold": sc.assist.align_hold_threshold,
        },
        "adhesion": {
            "k_cal": sc.adhesion.k_cal,
            "c0": sc.adhesion.c0,
            "c_p": sc.adhesion.c_p,
        },
    }
    if sc.table_region is not None:
        d["table_region"] = _box_to_json(sc.table_region)
    if sc.prior is not None:
        d["prior"] = dict(sc.prior)
    return d


def scenario_from_json(d: dict) -> Scenario:
    try:
        objects = tuple(
            SceneObject(
                id=str(o["id"]),
                pose=Pose(*(float(v) for v in o["pose"])),
                mass=float(o["mass"]),
                contact_radius=float(o["contact_radius"]),
                width=float(o["width"]),
                adhesion_energy=float(o["adhesion_energy"]),
                friction_mu=float(o["friction_mu"]),
                count=int(o.get("count", 1)),
                preferred_grasp=o.get("grasp"),
            )
            for o in d["objects"]
        )
        g = d["gripper"]
        gripper = GripperParams(
            grasp_types=tuple(
                GraspType(tag=str(t["tag"]), offset=Pose(*(float(v) for v in t["offset"])))
                for t in g["grasp_types"]
            ),
            pad_radius=float(g.get("pad_radius", 0.03)),
            stroke=float(g.get("stroke", 0.08)),
            f_max=float(g.get("f_max", 70.0)),
            p_min=float(g.get("p_min", -13.0)),
            p_max=float(g.get("p_max", 2.9)),
            tau_sw=float(g.get("tau_sw", 0.1)),
            capture_radius=float(g.get("capture_radius", 0.02)),
            contact_tol=float(g.get("contact_tol", 0.01)),
        )
        p = d.get("physics", {})
        physics = PhysicsParams(
            gravity=float(p.get("gravity", 9.81)),
            dt=float(p.get("dt", 0.05)),
            v_max=float(p.get("v_max", 0.25)),
            ee_start=Pose(*(float(v) for v in p.get("ee_start", (0.4, 0.0, 0.25)))),
            step_budget_s=(None if p.get("step_budget_s") is None else float(p["step_budget_s"])),
        )
        a = d.get("assistance", {})
        assist = AssistParams(
            alpha=float(a.get("alpha", 0.4)),
            beta=float(a.get("beta", 5.0)),
            k_r=float(a.get("k_r", 1.0)),
            belief_floor=float(a.get("belief_floor", 1e-6)),
            align_hold=bool(a.get("align_hold", True)),
            align_hold_threshold=float(a.get("align_hold_threshold", 0.8)),
        )
        ad = d.get("adhesion", {})
        adhesion = AdhesionParams(
            k_cal=float(ad.get("k_cal", DEFAULT_K_CAL)),
            c0=float(ad.get("c0", 1.0e-4)),
            c_p=float(ad.get("c_p", 1.0)),
        )
        sc = Scenario(
            name=str(d.get("name", "scenario")),
            objects=objects,
            workspace=_box_from_json(d["workspace"], "workspace"),
            bin_region=_box_from_json(d["bin"], "bin"),
            gripper=gripper,
            physics=physics,
            assist=assist,
            adhesion=adhesion,
            table_region=(
                _box_from_json(d["table_region"], "table_region")
                if "table_region" in d
                else None
            ),
            prior=({str(k): float(v) for k, v in d["prior"].items()} if "prior" in d else None),
            seed=int(d.get("seed", 0)),
        )
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc
    sc.validate()
    return sc


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_json(json.load(fh))


def save_scenario(sc: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_json(sc), fh, indent=2)
        fh.write("\n")


def scenario_hash(sc: Scenario) -> str:
    canon = json.dumps(scenario_to_json(sc), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def with_overrides(sc: Scenario, *, alpha=None, beta=None, seed=None, dt=None) -> Scenario:
    """Common CLI overrides without mutating the loaded scenario."""
    if alpha is not None:
        sc = replace(sc, assist=replace(sc.assist, alpha=float(alpha)))
    if beta is not None:
        sc = replace(sc, assist=replace(sc.assist, beta=float(beta)))
    if seed is not None:
        sc = replace(sc, seed=int(seed))
    if dt is not None:
        sc = replace(sc, physics=replace(sc.physics, dt=float(dt)))
    return sc
