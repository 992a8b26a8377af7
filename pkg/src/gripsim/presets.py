"""Built-in scenarios used by the test suite, the benchmark sweeps and the
live demo.

The benchmark scenarios run a coarser control period (dt = 0.2 s) and a
faster arm (0.4 m/s) than the interactive defaults so that the softmax
operator model is usefully peaked at tabletop distances for the rationality
values the benchmarks sweep.
"""

from __future__ import annotations

from .scenario import (
    AdhesionParams,
    AssistParams,
    Box,
    DEFAULT_K_CAL,
    GraspType,
    GripperParams,
    PhysicsParams,
    Pose,
    SceneObject,
    Scenario,
)

# Pads sit under the fingertips of the parallel mechanism; with the 80 mm
# stroke open and a 75 mm pad on each finger the pad centers land roughly
# 70 mm either side of the pinch axis.
BENCH_GRIPPER = GripperParams(
    grasp_types=(
        GraspType("rigid", Pose(0.0, 0.0, 0.0)),
        GraspType("soft_1", Pose(0.0, 0.07, 0.0)),
        GraspType("soft_2", Pose(0.0, -0.07, 0.0)),
    ),
    capture_radius=0.035,
)

BENCH_ADHESION = AdhesionParams(k_cal=DEFAULT_K_CAL, c0=1.0e-4, c_p=1.0)


def _obj(oid, x, y, mass, radius, width, energy, mu, count=1, grasp=None):
    return SceneObject(
        id=oid,
        pose=Pose(x, y, 0.0),
        mass=mass,
        contact_radius=radius,
        width=width,
        adhesion_energy=energy,
        friction_mu=mu,
        count=count,
        preferred_grasp=grasp,
    )


def canonical3() -> Scenario:
    """Three objects, three grasp types; the convergence benchmark target is
    (candy, soft_1).

    The candy sits straight below the start pose so reaching it approaches
    along -y (which discriminates the +y pad), while the two decoys flank the
    start along +-x where arm motion separates them immediately.
    """
    return Scenario(
        name="canonical3",
        objects=(
            _obj("block", 0.25, 0.70, 0.030, 0.015, 0.030, 10.0, 0.4, grasp="soft_2"),
            _obj("candy", 0.60, 0.30, 0.012, 0.009, 0.012, 8.0, 0.4, count=10, grasp="soft_1"),
            _obj("jar", 0.95, 0.70, 0.500, 0.025, 0.060, 2.0, 0.5, grasp="rigid"),
        ),
        workspace=Box((0.0, -0.8, 0.0), (1.2, 0.8, 0.5)),
        bin_region=Box((0.48, -0.75, 0.0), (0.72, -0.45, 0.2)),
        table_region=Box((0.0, -0.40, 0.0), (1.2, 0.8, 0.5)),
        gripper=BENCH_GRIPPER,
        physics=PhysicsParams(dt=0.25, v_max=1.0, ee_start=Pose(0.6, 0.72, 0.3)),
        assist=AssistParams(alpha=0.4, beta=5.0, k_r=4.0),
        adhesion=BENCH_ADHESION,
        seed=0,
    )


def study15() -> Scenario:
    """Fifteen objects mirroring the user-study composition: three large items
    pinched rigidly, twelve adhesive targets of which three are piles."""
    objects = (
        # rigid-intended: too heavy for the adhesive at full vacuum
        _obj("syrup", 0.50, -0.50, 0.600, 0.030, 0.065, 2.0, 0.5, grasp="rigid"),
        _obj("glue", 0.85, -0.40, 0.300, 0.020, 0.050, 2.0, 0.5, grasp="rigid"),
        _obj("tower", 1.00, 0.60, 0.250, 0.025, 0.075, 2.0, 0.45, grasp="rigid"),
        # piles
        _obj("beans", 0.60, 0.60, 0.010, 0.007, 0.010, 8.0, 0.4, count=20, grasp="soft_1"),
        _obj("mms", 0.95, 0.20, 0.015, 0.009, 0.012, 8.0, 0.4, count=15, grasp="soft_2"),
        _obj("nuts", 0.55, 0.25, 0.040, 0.012, 0.015, 12.0, 0.5, count=10, grasp="soft_1"),
        # single adhesive targets
        _obj("dice", 0.75, 0.50, 0.010, 0.008, 0.016, 10.0, 0.4, grasp="soft_2"),
        _obj("spinner", 1.05, -0.10, 0.030, 0.025, 0.070, 10.0, 0.4, grasp="soft_1"),
        _obj("lego", 0.45, 0.10, 0.012, 0.012, 0.030, 9.0, 0.4, grasp="soft_2"),
        _obj("pnuts", 0.70, -0.25, 0.008, 0.010, 0.012, 9.0, 0.4, grasp="soft_1"),
        _obj("propeller", 0.90, 0.45, 0.020, 0.020, 0.050, 10.0, 0.4, grasp="soft_2"),
        _obj("wheel_big", 1.05, 0.45, 0.050, 0.035, 0.070, 12.0, 0.4, grasp="soft_2"),
        _obj("wheel_small", 0.65, -0.05, 0.020, 0.015, 0.040, 10.0, 0.4, grasp="soft_1"),
        _obj("washer", 0.45, 0.45, 0.005, 0.009, 0.018, 8.0, 0.4, grasp="soft_2"),
        _obj("wood", 0.85, 0.05, 0.040, 0.020, 0.040, 10.0, 0.4, grasp="soft_1"),
    )
    return Scenario(
        name="study15",
        objects=objects,
        workspace=Box((0.0, -0.8, 0.0), (1.2, 0.8, 0.5)),
        bin_region=Box((0.03, -0.20, 0.0), (0.27, 0.20, 0.2)),
        table_region=Box((0.35, -0.8, 0.0), (1.2, 0.8, 0.5)),
        gripper=BENCH_GRIPPER,
        physics=PhysicsParams(dt=0.25, v_max=1.0, ee_start=Pose(0.7, 0.0, 0.3), step_budget_s=1500.0),
        assist=AssistParams(alpha=0.4, beta=5.0, k_r=4.0),
        adhesion=BENCH_ADHESION,
        seed=0,
    )


def demo() -> Scenario:
    """Small interactive scene at a 20 Hz control rate for live teleoperation."""
    return Scenario(
        name="demo",
        objects=(
            _obj("mug", 0.55, 0.25, 0.350, 0.030, 0.070, 2.0, 0.5, grasp="rigid"),
            _obj("candy", 0.70, -0.15, 0.010, 0.008, 0.012, 8.0, 0.4, count=12, grasp="soft_1"),
            _obj("sponge", 0.40, -0.25, 0.015, 0.020, 0.040, 10.0, 0.4, grasp="soft_2"),
            _obj("token", 0.75, 0.30, 0.008, 0.010, 0.015, 9.0, 0.4, grasp="soft_1"),
        ),
        workspace=Box((0.0, -0.5, 0.0), (0.9, 0.5, 0.4)),
        bin_region=Box((0.03, -0.45, 0.0), (0.22, -0.18, 0.15)),
        table_region=Box((0.0, -0.12, 0.0), (0.9, 0.5, 0.4)),
        gripper=BENCH_GRIPPER,
        physics=PhysicsParams(dt=0.05, v_max=0.25, ee_start=Pose(0.45, 0.1, 0.25)),
        assist=AssistParams(alpha=0.4, beta=5.0, k_r=1.0),
        adhesion=BENCH_ADHESION,
        seed=0,
    )


PRESETS = {
    "canonical3": canonical3,
    "study15": study15,
    "demo": demo,
}
