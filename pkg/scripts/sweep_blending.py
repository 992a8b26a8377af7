#!/usr/bin/env python3
"""Sweep the arbitration weight and operator rationality on a scenario and
report how the study metrics move. Useful for picking an alpha.

Usage: python scripts/sweep_blending.py [--scenario canonical3] [--seeds 20]
"""

import argparse
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from gripsim.agents import SyntheticOperator
from gripsim.cli import resolve_scenario
from gripsim.scenario import with_overrides
from gripsim.session import compute_metrics, run_episode


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--scenario", default="canonical3")
    ap.add_argument("--alphas", default="0.2,0.4,0.6,0.8,1.0")
    ap.add_argument("--agent-betas", default="1,3,5,10")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--patience", type=float, default=120.0)
    args = ap.parse_args()

    base = resolve_scenario(args.scenario)
    alphas = [float(v) for v in args.alphas.split(",")]
    betas = [float(v) for v in args.agent_betas.split(",")]

    print(f"{'alpha':>6s} {'b_agent':>8s} {'success%':>9s} {'time/obj':>9s} {'dist/obj':>9s}")
    for alpha in alphas:
        for beta in betas:
            sc = with_overrides(base, alpha=alpha)
            vals = []
            for seed in range(args.seeds):
                op = SyntheticOperator(sc, beta=beta, seed=seed, patience_s=args.patience)
                log = run_episode(sc, op, mode="shared", seed=seed)
                m = compute_metrics(log)
                vals.append((m.success_rate, m.grasp_time, m.grasp_distance))
            a = np.array(vals).mean(axis=0)
            print(f"{alpha:6.2f} {beta:8.1f} {a[0]:9.1f} {a[1]:9.1f} {a[2]:9.2f}")


if __name__ == "__main__":
    main()
