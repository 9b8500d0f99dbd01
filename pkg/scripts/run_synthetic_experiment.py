#!/usr/bin/env python3
"""End-to-end synthetic experiment: synth -> grid -> fuse -> evaluate -> report.

Example:
    python scripts/run_synthetic_experiment.py --workdir /tmp/emoshare_demo \
        --models 9 --seed 42 --noise 0.3
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from emoshare.cli import main as emoshare


def run(cmd: list[str]) -> None:
    print(f"$ emoshare {' '.join(cmd)}")
    code = emoshare(cmd)
    if code != 0:
        sys.exit(code)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", required=True)
    parser.add_argument("--models", type=int, default=9)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--noise", type=float, default=0.3)
    parser.add_argument("--train", type=int, default=200)
    parser.add_argument("--dev", type=int, default=80)
    parser.add_argument("--test", type=int, default=80)
    parser.add_argument("--dim", type=int, default=16)
    parser.add_argument("--scoring", choices=["nmae", "nmse", "both"], default="both")
    args = parser.parse_args()

    workdir = Path(args.workdir)
    data = workdir / "data"
    out = workdir / "run"
    names = [f"synth{m}" for m in range(args.models)]

    run([
        "synth", "--seed", str(args.seed), "--models", str(args.models),
        "--dim", str(args.dim), "--train", str(args.train), "--dev", str(args.dev),
        "--test", str(args.test), "--noise", str(args.noise), "--out", str(data),
    ])

    grid_cmd = ["grid"]
    for name in names:
        grid_cmd += ["--features", f"{name}={data / f'features_{name}.csv'}"]
    grid_cmd += [
        "--labels", str(data / "labels.csv"),
        "--partition", str(data / "partition.csv"),
        "--out", str(out), "--scoring", args.scoring,
    ]
    run(grid_cmd)

    scorings = ["nmae", "nmse"] if args.scoring == "both" else [args.scoring]
    for scoring in scorings:
        fused = out / f"fusion.{scoring}.dev_predictions.csv"
        run(
            ["fuse"]
            + [str(out / f"{name}.{scoring}.dev_predictions.csv") for name in names]
            + ["--out", str(fused)]
        )
        run([
            "evaluate", "--predictions", str(fused),
            "--labels", str(data / "labels.csv"),
            "--partition", str(data / "partition.csv"),
            "--split", "dev",
            "--source-name", "fusion(" + ",".join(names) + ")",
            "--scoring", scoring,
            "--out-json", str(out / f"fusion.{scoring}.dev.evalreport.json"),
        ])

    run(["report", "--run-dir", str(out), "--out", str(out / "report.txt")])
    print(f"\nArtifacts in {out}")


if __name__ == "__main__":
    main()
