"""Shared scenario builders for the test suite."""

import pytest

from gripsim.scenario import (
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

GRIPPER = GripperParams(
    grasp_types=(
        GraspType("rigid", Pose(0.0, 0.0, 0.0)),
        GraspType("soft_1", Pose(0.0, 0.07, 0.0)),
        GraspType("soft_2", Pose(0.0, -0.07, 0.0)),
    ),
    capture_radius=0.035,
)


def make_object(
    oid="obj",
    x=0.5,
    y=0.0,
    mass=0.02,
    radius=0.015,
    width=0.03,
    energy=10.0,
    mu=0.4,
    count=1,
    grasp=None,
):
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


def make_scenario(
    objects=None,
    dt=0.05,
    v_max=0.25,
    ee_start=Pose(0.4, 0.0, 0.25),
    alpha=0.4,
    beta=5.0,
    k_r=1.0,
    gravity=9.81,
    belief_floor=1e-6,
    align_hold=True,
    workspace=Box((-1.0, -1.0, 0.0), (2.0, 1.0, 1.0)),
    bin_region=Box((-0.9, -0.9, 0.0), (-0.5, -0.5, 0.2)),
    table_region=None,
    prior=None,
    step_budget_s=None,
    seed=0,
):
    if objects is None:
        objects = (make_object(),)
    return Scenario(
        name="test",
        objects=tuple(objects),
        workspace=workspace,
        bin_region=bin_region,
        table_region=table_region,
        gripper=GRIPPER,
        physics=PhysicsParams(
            gravity=gravity, dt=dt, v_max=v_max, ee_start=ee_start, step_budget_s=step_budget_s
        ),
        assist=AssistParams(
            alpha=alpha, beta=beta, k_r=k_r, belief_floor=belief_floor, align_hold=align_hold
        ),
        adhesion=AdhesionParams(k_cal=DEFAULT_K_CAL),
        prior=prior,
        seed=seed,
    )


@pytest.fixture
def scenario():
    return make_scenario()
