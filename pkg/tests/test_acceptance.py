"""Acceptance criteria, one test per criterion, each printing a PASS line.

Each criterion encodes its stated tolerance and runtime budget; nothing here
is calibrated at runtime.
"""

import math
import time

import numpy as np
import pytest

from gripsim import adhesion, inference, world
from gripsim.agents import SyntheticOperator
from gripsim.assist import assistance_raw, blend
from gripsim.scenario import AdhesionParams, Box, Pose
from gripsim.presets import canonical3, study15
from gripsim.session import SessionLoop, compute_metrics, replay_log, run_episode
from gripsim.world import initial_state, step

from conftest import GRIPPER, make_object, make_scenario


def report(name: str, ok: bool, detail: str = "") -> None:
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{name}: {detail}"


# -- 1. blending endpoints ---------------------------------------------------


def test_blending_endpoints():
    t0 = time.time()
    rng = np.random.default_rng(0)
    for _ in range(1000):
        a_h = tuple(rng.uniform(-1, 1, 3))
        a_r = tuple(rng.uniform(-1, 1, 3))
        assert blend(a_h, a_r, 1.0, 1e9) == a_h  # bitwise
        assert blend(a_h, a_r, 0.0, 1e9) == a_r  # bitwise
        mid = blend(a_h, a_r, 0.5, 1e9)
        for m, h, r in zip(mid, a_h, a_r):
            assert abs(m - (h + r) / 2) <= 1e-12
    elapsed = time.time() - t0
    report("blending-endpoints", elapsed < 1.0, f"(1000 pairs in {elapsed:.2f}s)")


# -- 2. belief oracle equivalence ---------------------------------------------


def _random_scenario(rng):
    n = int(rng.integers(2, 7))
    objects = []
    for i in range(n):
        objects.append(
            make_object(
                f"o{i}",
                x=float(rng.uniform(-1.5, 1.5)),
                y=float(rng.uniform(-0.8, 0.8)),
                mass=float(rng.uniform(0.005, 0.1)),
                radius=float(rng.uniform(0.005, 0.03)),
            )
        )
    return make_scenario(
        objects=objects,
        dt=0.05,
        belief_floor=0.0,
        workspace=Box((-2.0, -1.0, 0.0), (2.0, 1.0, 1.0)),
        bin_region=Box((-1.9, -0.95, 0.0), (-1.6, -0.7, 0.2)),
        ee_start=Pose(0.0, 0.0, 0.3),
    )


def test_belief_oracle_equivalence():
    t0 = time.time()
    worst = 0.0
    for trial in range(50):
        rng = np.random.default_rng(1000 + trial)
        sc = _random_scenario(rng)
        s = initial_state(sc)
        belief = inference.prior_belief(sc)
        log_table = belief.log_p.copy()
        for _ in range(200):
            a = tuple(rng.uniform(-sc.physics.v_max, sc.physics.v_max, 3))
            log_table = log_table + inference.likelihood_logits(belief, s, a, sc.assist.beta, sc)
            belief = inference.update(belief, s, a, sc, floor=0.0)
            s = step(s, a, 0.0, 0.0, sc)
        m = log_table.max()
        oracle = np.exp(log_table - (m + np.log(np.exp(log_table - m).sum())))
        worst = max(worst, float(np.max(np.abs(belief.probabilities() - oracle))))
    elapsed = time.time() - t0
    report(
        "belief-oracle-equivalence",
        worst <= 1e-9 and elapsed < 10.0,
        f"(max abs err {worst:.2e}, {elapsed:.1f}s)",
    )


# -- 3. assistance fixed point and symmetry -----------------------------------


def test_assistance_fixed_point_and_symmetry():
    sc = make_scenario(
        objects=[make_object("o", x=1.0, y=0.25)],
        prior={"o/soft_2": 1.0},
        workspace=Box((-3, -3, 0), (3, 3, 1)),
        bin_region=Box((-2.9, -2.9, 0), (-2.5, -2.5, 0.2)),
    )
    s = initial_state(sc)
    b = inference.prior_belief(sc)
    raw = assistance_raw(b, s, sc)
    frame = s.ee.offset(sc.gripper.grasp("soft_2").offset)
    exact = raw == (1.0 - frame.x, 0.25 - frame.y, 0.0 - frame.z)

    sc2 = make_scenario(
        objects=[make_object("p", x=1.0), make_object("m", x=-1.0)],
        prior={"p/rigid": 0.5, "m/rigid": 0.5},
        ee_start=Pose(0.0, 0.0, 0.01),
        workspace=Box((-3, -3, 0), (3, 3, 1)),
        bin_region=Box((-2.9, -2.9, 0), (-2.5, -2.5, 0.2)),
    )
    raw2 = assistance_raw(inference.prior_belief(sc2), initial_state(sc2), sc2)
    symmetric = all(abs(v) <= 1e-12 for v in (raw2[0], raw2[1]))
    report("assistance-fixed-point", exact and symmetric,
           f"(raw={raw}, symmetric xy={raw2[:2]})")


# -- 4. adhesion laws ----------------------------------------------------------


def test_adhesion_laws():
    t0 = time.time()
    params = AdhesionParams(k_cal=1.0)
    pressures = np.linspace(GRIPPER.p_min, GRIPPER.p_max, 1000)
    caps = [adhesion.force_capacity(p, 0.01, 10.0, params, GRIPPER) for p in pressures]
    decreasing = all(b < a for a, b in zip(caps, caps[1:]))

    scaling_r = all(
        adhesion.force_capacity(p, 0.012, 10.0, params, GRIPPER)
        == 2 * adhesion.force_capacity(p, 0.006, 10.0, params, GRIPPER)
        for p in (-13.0, -6.5, 0.0, 2.9)
    )
    scaling_g = all(
        adhesion.force_capacity(p, 0.01, 48.0, params, GRIPPER)
        == 2 * adhesion.force_capacity(p, 0.01, 12.0, params, GRIPPER)
        for p in (-13.0, -6.5, 0.0, 2.9)
    )
    at_pad = adhesion.force_capacity(-5.0, GRIPPER.pad_radius, 10.0, params, GRIPPER)
    saturated = all(
        adhesion.force_capacity(-5.0, r, 10.0, params, GRIPPER) == at_pad
        for r in np.linspace(GRIPPER.pad_radius, 0.2, 50)
    )
    elapsed = time.time() - t0
    report(
        "adhesion-laws",
        decreasing and scaling_r and scaling_g and saturated and elapsed < 1.0,
        f"(decreasing={decreasing}, 2x-R={scaling_r}, 2x-sqrtG={scaling_g}, "
        f"saturated={saturated}, {elapsed:.2f}s)",
    )


# -- 5. switching latency -------------------------------------------------------


def test_switching_latency():
    results = []
    for dt in (0.05, 0.04, 0.2, 0.25):
        sc = make_scenario(objects=[make_object()], dt=dt)
        s = initial_state(sc)
        # drive pressure to +2.9 and let the delay line settle
        s = step(s, (0, 0, 0), 0.0, sc.gripper.p_max, sc)
        for _ in range(10):
            s = step(s, (0, 0, 0), 0.0, 0.0, sc)
        assert world.effective_pressure_now(s, sc) == sc.gripper.p_max
        # step command to the floor and count ticks until capacity changes
        params = sc.adhesion
        cap_before = adhesion.force_capacity(
            world.effective_pressure_now(s, sc), 0.01, 10.0, params, sc.gripper
        )
        s = step(s, (0, 0, 0), 0.0, sc.gripper.p_min - sc.gripper.p_max, sc)
        ticks = 0
        while True:
            cap = adhesion.force_capacity(
                world.effective_pressure_now(s, sc), 0.01, 10.0, params, sc.gripper
            )
            if cap != cap_before:
                break
            s = step(s, (0, 0, 0), 0.0, 0.0, sc)
            ticks += 1
            assert ticks < 50
        expected = math.ceil(sc.gripper.tau_sw / dt)
        results.append(ticks == expected)
    report("switching-latency", all(results), f"(per-dt results {results})")


# -- 6. grasp cycle -------------------------------------------------------------


def _cycle_scenario(mass, radius, energy, width, grasp):
    return make_scenario(
        objects=[make_object("item", x=0.5, y=0.1, mass=mass, radius=radius,
                             width=width, energy=energy, mu=0.5, grasp=grasp)],
        dt=0.05,
        step_budget_s=60.0,
    )


def test_grasp_cycle_parameter_sweep():
    t0 = time.time()
    params = make_scenario().adhesion
    outcomes = []

    # 8 soft-feasible items: weight at 30% of capacity at full vacuum
    rng = np.random.default_rng(2)
    for i in range(8):
        radius = float(rng.uniform(0.006, 0.035))
        energy = float(rng.uniform(4.0, 20.0))
        cap = adhesion.force_capacity(GRIPPER.p_min, radius, energy, params, GRIPPER)
        mass = 0.3 * cap / 9.81
        sc = _cycle_scenario(mass, radius, energy, 0.04, "soft_1")
        op = SyntheticOperator(sc, beta=None, seed=i)
        log = run_episode(sc, op, mode="human", seed=i)
        ok = log.terminal == "all_binned"
        outcomes.append(("feasible", ok))

    # 6 overweight items: must never soft-attach
    for i in range(6):
        radius = float(rng.uniform(0.006, 0.035))
        energy = float(rng.uniform(4.0, 20.0))
        cap = adhesion.force_capacity(GRIPPER.p_min, radius, energy, params, GRIPPER)
        mass = (1.5 + i) * cap / 9.81
        sc = _cycle_scenario(mass, radius, energy, 0.04, "soft_1")
        op = SyntheticOperator(sc, beta=None, seed=i, patience_s=10.0)
        log = run_episode(sc, op, mode="human", seed=i)
        soft_attached = any(
            e.kind == "soft_attach" for r in log.records for e in r.events
        )
        outcomes.append(("overweight", not soft_attached))

    # 6 wide items: must never rigid-attach
    for i in range(6):
        width = 0.081 + 0.01 * i
        sc = _cycle_scenario(0.2, 0.02, 10.0, width, "rigid")
        op = SyntheticOperator(sc, beta=None, seed=i, patience_s=10.0)
        log = run_episode(sc, op, mode="human", seed=i)
        rigid_attached = any(
            e.kind == "rigid_attach" for r in log.records for e in r.events
        )
        outcomes.append(("wide", not rigid_attached))

    elapsed = time.time() - t0
    ok = all(flag for _, flag in outcomes) and len(outcomes) == 20
    report(
        "grasp-cycle",
        ok and elapsed < 30.0,
        f"({sum(f for _, f in outcomes)}/20 behaved, {elapsed:.1f}s)",
    )


# -- 7. model-matched convergence ------------------------------------------------


def test_model_matched_convergence():
    t0 = time.time()
    sc = canonical3()
    target = ("candy", "soft_1")
    hits = 0
    for seed in range(100):
        op = SyntheticOperator(sc, targets=[target], beta=5.0, seed=seed,
                               patience_s=240.0, align_frac=0.25, settle_ticks=5)
        op.begin(sc, seed)
        loop = SessionLoop(sc, mode="shared", seed=seed)
        best = 0.0
        while loop.terminal is None and loop.tick_count < 4000:
            rec = loop.tick(op.act(loop.state))
            if any(e.kind.endswith("attach") for e in rec.events):
                break
            best = max(best, loop.belief.prob(*target))
            if op.finished:
                break
        hits += best > 0.9
    elapsed = time.time() - t0
    report(
        "model-matched-convergence",
        hits >= 95 and elapsed < 120.0,
        f"({hits}/100 episodes crossed 0.9 pre-contact, {elapsed:.0f}s)",
    )


# -- 8. directional study reproduction --------------------------------------------


def _bootstrap_positive(diffs, n_boot=10000, seed=0):
    """One-sided paired bootstrap: P5 of the resampled mean difference > 0."""
    rng = np.random.default_rng(seed)
    diffs = np.asarray(diffs)
    idx = rng.integers(0, len(diffs), size=(n_boot, len(diffs)))
    means = diffs[idx].mean(axis=1)
    return float(np.percentile(means, 5)) > 0.0


def test_directional_study_reproduction():
    t0 = time.time()
    sc = study15()
    rows = {"human": [], "shared": []}
    for mode in ("human", "shared"):
        for seed in range(100):
            op = SyntheticOperator(sc, beta=3.0, seed=seed, patience_s=120.0)
            log = run_episode(sc, op, mode=mode, seed=seed)
            m = compute_metrics(log)
            rows[mode].append(
                (m.success_rate, m.grasp_time, m.grasp_distance, m.input_time)
            )
    h = np.array(rows["human"])
    s = np.array(rows["shared"])
    success_up = _bootstrap_positive(s[:, 0] - h[:, 0])
    time_down = _bootstrap_positive(h[:, 1] - s[:, 1])
    dist_down = _bootstrap_positive(h[:, 2] - s[:, 2])
    input_down = _bootstrap_positive(h[:, 3] - s[:, 3])
    elapsed = time.time() - t0
    detail = (
        f"(success {h[:,0].mean():.0f}->{s[:,0].mean():.0f}%, "
        f"time {h[:,1].mean():.0f}->{s[:,1].mean():.0f}s, "
        f"dist {h[:,2].mean():.1f}->{s[:,2].mean():.1f}m, "
        f"input {h[:,3].mean():.0f}->{s[:,3].mean():.0f}s, {elapsed:.0f}s)"
    )
    report(
        "directional-study",
        success_up and time_down and dist_down and input_down and elapsed < 900.0,
        detail,
    )


# -- 9. determinism and replay ------------------------------------------------------


def test_determinism_and_replay():
    import asyncio

    from gripsim.server import TeleopServer, drive_frames
    from gripsim.session import read_log

    sc = make_scenario(
        objects=[make_object("o", x=0.5, y=0.1, grasp="soft_1")],
        dt=0.05,
        step_budget_s=30.0,
    )
    op = SyntheticOperator(sc, beta=4.0, seed=21)
    log = run_episode(sc, op, mode="shared", seed=21)
    fresh, problems = replay_log(log)
    replay_ok = problems == []

    frames = [
        {"aH": list(r.input.a_h), "df": r.input.df, "dP": r.input.dp}
        for r in log.records
    ]
    import tempfile, os

    with tempfile.TemporaryDirectory() as td:
        log_path = os.path.join(td, "socket.ndjson")
        server = TeleopServer(sc, mode="shared", seed=21, port=0, lockstep=True,
                              log_path=log_path)

        async def go():
            ready = asyncio.Event()
            task = asyncio.create_task(server.run(ready))
            await asyncio.wait_for(ready.wait(), 5)
            try:
                return await drive_frames(
                    f"ws://127.0.0.1:{server.bound_port}", frames
                )
            finally:
                task.cancel()
                try:
                    await task
                except asyncio.CancelledError:
                    pass

        asyncio.run(go())
        socket_log = read_log(log_path)

    transport_ok = len(socket_log.records) == len(log.records) and all(
        a.state == b.state and a.a == b.a and a.input == b.input
        and np.array_equal(a.belief, b.belief)
        for a, b in zip(log.records, socket_log.records)
    )
    report(
        "determinism-replay",
        replay_ok and transport_ok,
        f"(replay={replay_ok}, transport={transport_ok}, {len(log.records)} ticks)",
    )
