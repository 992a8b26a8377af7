"""Command-line surface: live serving, headless benchmarks, scenario checks,
log replay and metric extraction.

Scenarios are referenced by file path or by built-in preset name
(canonical3, study15, demo). SIM_SEED overrides the scenario seed.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import os
import sys
from pathlib import Path

from . import presets
from .agents import FrameOperator, ScriptOperator, SyntheticOperator, load_script
from .scenario import Scenario, ScenarioError, load_scenario, scenario_hash, with_overrides
from .session import compute_metrics, read_log, replay_log, run_episode, write_log
from .world import OperatorInput


def resolve_scenario(ref: str) -> Scenario:
    if os.path.exists(ref):
        return load_scenario(ref)
    if ref in presets.PRESETS:
        return presets.PRESETS[ref]()
    raise ScenarioError(f"scenario {ref!r}: no such file or preset")


def _seed_from_env(default: int) -> int:
    env = os.environ.get("SIM_SEED")
    return int(env) if env else default


def _operator_for(args, scenario: Scenario):
    if getattr(args, "script", None):
        return ScriptOperator(json.loads(Path(args.script).read_text()), scenario)
    if getattr(args, "frames", None):
        frames = json.loads(Path(args.frames).read_text())
        inputs = [
            OperatorInput.make(
                tuple(float(v) for v in fr.get("aH", (0, 0, 0))),
                df=float(fr.get("df", 0.0)),
                dp=float(fr.get("dP", 0.0)),
                v_max=scenario.physics.v_max,
            )
            for fr in frames
        ]
        return FrameOperator(inputs)
    return SyntheticOperator(
        scenario,
        beta=args.agent_beta,
        seed=_seed_from_env(scenario.seed),
        patience_s=args.patience,
    )


def cmd_validate(args) -> int:
    try:
        sc = resolve_scenario(args.scenario)
    except (ScenarioError, json.JSONDecodeError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 2
    print(f"ok: {sc.name} ({len(sc.objects)} objects, hash {scenario_hash(sc)})")
    return 0


def cmd_serve(args) -> int:
    from .server import TeleopServer

    sc = with_overrides(resolve_scenario(args.scenario), alpha=args.alpha, beta=args.beta)
    server = TeleopServer(
        sc,
        mode=args.mode,
        seed=_seed_from_env(args.seed if args.seed is not None else sc.seed),
        host=args.host,
        port=args.port,
        lockstep=args.lockstep,
        log_path=args.log_out,
    )
    try:
        asyncio.run(server.run())
    except KeyboardInterrupt:
        pass
    return 0


def cmd_run(args) -> int:
    sc = with_overrides(resolve_scenario(args.scenario), alpha=args.alpha, beta=args.beta)
    seed = _seed_from_env(args.seed if args.seed is not None else sc.seed)
    operator = _operator_for(args, sc)
    log = run_episode(sc, operator, mode=args.mode, seed=seed, max_ticks=args.max_ticks)
    metrics = compute_metrics(log)
    if args.out_log:
        write_log(log, args.out_log)
    if args.out_metrics:
        Path(args.out_metrics).write_text(json.dumps(metrics.as_json(), indent=2) + "\n")
    print(
        f"{log.mode}: {log.terminal} after {metrics.ticks} ticks; "
        f"success {metrics.success_rate:.1f}%, grasp_time {metrics.grasp_time:.2f}s, "
        f"grasp_distance {metrics.grasp_distance:.3f}m, input_time {metrics.input_time:.2f}s"
    )
    return 0


def _parse_list(text: str, cast):
    return [cast(v) for v in text.split(",") if v != ""]


def cmd_bench(args) -> int:
    sc = resolve_scenario(args.scenario)
    modes = _parse_list(args.modes, str)
    alphas = _parse_list(args.alphas, float)
    betas = _parse_list(args.betas, float)
    agent_betas = _parse_list(args.agent_betas, float)
    if "," in args.seeds:
        seeds = _parse_list(args.seeds, int)
    else:
        base = _seed_from_env(0)
        seeds = list(range(base, base + int(args.seeds)))
    if not (modes and alphas and betas and agent_betas and seeds):
        print("empty sweep", file=sys.stderr)
        return 2

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for mode in modes:
        for alpha in alphas:
            for beta in betas:
                for ab in agent_betas:
                    for seed in seeds:
                        cell = f"{mode}-a{alpha:g}-b{beta:g}-ab{ab:g}-s{seed}"
                        try:
                            cell_sc = with_overrides(sc, alpha=alpha, beta=beta, seed=seed)
                            op = SyntheticOperator(
                                cell_sc, beta=ab, seed=seed, patience_s=args.patience
                            )
                            log = run_episode(cell_sc, op, mode=mode, seed=seed)
                            m = compute_metrics(log)
                        except Exception as exc:  # a failed cell must not kill the sweep
                            rows.append([mode, alpha, beta, ab, seed] + ["failed"] * 7)
                            (outdir / f"{cell}.error.txt").write_text(f"{exc}\n")
                            continue
                        (outdir / f"{cell}.json").write_text(
                            json.dumps(m.as_json(), indent=2) + "\n"
                        )
                        rows.append(
                            [mode, alpha, beta, ab, seed, m.success_rate, m.grasp_time,
                             m.grasp_distance, m.input_time, m.sim_time, m.ticks, m.terminal]
                        )
                        if args.verbose:
                            print(f"{cell}: success {m.success_rate:.1f}%")
    with open(outdir / "aggregate.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["mode", "alpha", "beta", "agent_beta", "seed", "success_rate", "grasp_time",
             "grasp_distance", "input_time", "sim_time", "ticks", "terminal"]
        )
        w.writerows(rows)
    print(f"wrote {len(rows)} cells to {outdir}")
    return 0


def cmd_replay(args) -> int:
    log = read_log(args.log)
    fresh, problems = replay_log(log)
    if problems:
        print("MISMATCH:", *problems, sep="\n  ", file=sys.stderr)
        return 1
    m = compute_metrics(fresh)
    if args.out_metrics:
        Path(args.out_metrics).write_text(json.dumps(m.as_json(), indent=2) + "\n")
    print(f"replay exact over {m.ticks} ticks; success {m.success_rate:.1f}%")
    return 0


def cmd_metrics(args) -> int:
    log = read_log(args.log)
    m = compute_metrics(log)
    text = json.dumps(m.as_json(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return 0


def cmd_drive(args) -> int:
    from .server import drive_frames

    frames = json.loads(Path(args.frames).read_text())
    result = asyncio.run(drive_frames(args.url, frames))
    if result["metrics"] is None:
        print("session did not reach a terminal state", file=sys.stderr)
    if args.out_metrics and result["metrics"] is not None:
        Path(args.out_metrics).write_text(json.dumps(result["metrics"], indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("--scenario", required=True)
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("serve", help="run the live teleoperation service")
    s.add_argument("--scenario", required=True)
    s.add_argument("--mode", choices=["human", "shared"], default="shared")
    s.add_argument("--alpha", type=float, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8765)
    s.add_argument("--lockstep", action="store_true",
                   help="advance one tick per input frame instead of wall-clock pacing")
    s.add_argument("--log-out", default=None, help="write the episode NDJSON log here")
    s.set_defaults(func=cmd_serve)

    r = sub.add_parser("run", help="run one headless episode")
    r.add_argument("--scenario", required=True)
    r.add_argument("--mode", choices=["human", "shared"], default="shared")
    r.add_argument("--alpha", type=float, default=None)
    r.add_argument("--beta", type=float, default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--script", default=None, help="timed input script JSON")
    r.add_argument("--frames", default=None, help="per-tick input frames JSON")
    r.add_argument("--agent-beta", type=float, default=3.0,
                   help="synthetic operator rationality (ignored with --script/--frames)")
    r.add_argument("--patience", type=float, default=120.0)
    r.add_argument("--max-ticks", type=int, default=None)
    r.add_argument("--out-log", default=None)
    r.add_argument("--out-metrics", default=None)
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="sweep modes/alphas/betas/seeds headlessly")
    b.add_argument("--scenario", required=True)
    b.add_argument("--modes", default="human,shared")
    b.add_argument("--alphas", default="0.4")
    b.add_argument("--betas", default="5")
    b.add_argument("--agent-betas", default="3")
    b.add_argument("--seeds", default="10", help="count, or comma-separated list")
    b.add_argument("--patience", type=float, default=120.0)
    b.add_argument("--out", required=True)
    b.add_argument("--verbose", action="store_true")
    b.set_defaults(func=cmd_bench)

    rp = sub.add_parser("replay", help="re-simulate a log and verify it exactly")
    rp.add_argument("--log", required=True)
    rp.add_argument("--out-metrics", default=None)
    rp.set_defaults(func=cmd_replay)

    m = sub.add_parser("metrics", help="compute study metrics from a log")
    m.add_argument("--log", required=True)
    m.add_argument("--out", default=None)
    m.set_defaults(func=cmd_metrics)

    d = sub.add_parser("drive", help="drive a serving session from an input-frames file")
    d.add_argument("--url", required=True)
    d.add_argument("--frames", required=True)
    d.add_argument("--out-metrics", default=None)
    d.set_defaults(func=cmd_drive)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
