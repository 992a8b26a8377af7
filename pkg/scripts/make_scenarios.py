#!/usr/bin/env python3
"""Regenerate the shipped scenario JSON files from the preset builders."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from gripsim.presets import PRESETS
from gripsim.scenario import save_scenario, scenario_hash


def main() -> None:
    outdir = pathlib.Path(__file__).resolve().parents[1] / "scenarios"
    outdir.mkdir(exist_ok=True)
    for name, build in PRESETS.items():
        sc = build()
        path = outdir / f"{name}.json"
        save_scenario(sc, str(path))
        print(f"{path}  ({len(sc.objects)} objects, hash {scenario_hash(sc)})")


if __name__ == "__main__":
    main()
