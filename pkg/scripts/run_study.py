#!/usr/bin/env python3
"""Run the human-vs-shared comparison on the 15-object scenario and print a
summary table with paired bootstrap confidence checks.

Usage: python scripts/run_study.py [--seeds 100] [--agent-beta 3] [--out DIR]
"""

import argparse
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from gripsim.agents import SyntheticOperator
from gripsim.presets import study15
from gripsim.session import compute_metrics, run_episode

METRICS = ("success_rate", "grasp_time", "grasp_distance", "input_time")


def bootstrap_p5(diffs, n_boot=10000, seed=0):
    rng = np.random.default_rng(seed)
    diffs = np.asarray(diffs)
    idx = rng.integers(0, len(diffs), size=(n_boot, len(diffs)))
    return float(np.percentile(diffs[idx].mean(axis=1), 5))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--agent-beta", type=float, default=3.0)
    ap.add_argument("--patience", type=float, default=120.0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    sc = study15()
    rows = {"human": [], "shared": []}
    for mode in ("human", "shared"):
        for seed in range(args.seeds):
            op = SyntheticOperator(sc, beta=args.agent_beta, seed=seed,
                                   patience_s=args.patience)
            log = run_episode(sc, op, mode=mode, seed=seed)
            m = compute_metrics(log)
            rows[mode].append([getattr(m, k) for k in METRICS])
        print(f"{mode}: {args.seeds} episodes done")

    h = np.array(rows["human"])
    s = np.array(rows["shared"])
    print(f"\n{'metric':15s} {'human':>10s} {'shared':>10s} {'boot p5 of gain':>16s}")
    for j, name in enumerate(METRICS):
        gain = (s[:, j] - h[:, j]) if name == "success_rate" else (h[:, j] - s[:, j])
        p5 = bootstrap_p5(gain, seed=j)
        print(f"{name:15s} {h[:, j].mean():10.2f} {s[:, j].mean():10.2f} {p5:16.3f}")

    if args.out:
        out = pathlib.Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        np.savetxt(out / "human.csv", h, delimiter=",", header=",".join(METRICS))
        np.savetxt(out / "shared.csv", s, delimiter=",", header=",".join(METRICS))
        print(f"wrote raw per-seed metrics to {out}")


if __name__ == "__main__":
    main()
