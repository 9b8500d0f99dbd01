"""CLI: turn an audio manifest into an emoshare feature CSV.

Exit codes match the main toolkit: 0 success, 2 usage error, 3 data
error.  Skipped (undecodable) rows do not fail the run; they are listed
in the `<out>.errors.csv` sidecar.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ExtractorError, ManifestError
from .extract import ExtractorJob, extract, load_manifest
from .roster import ROSTER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emoshare-extract",
        description="Extract mean-pooled speech-encoder features into a feature CSV.",
    )
    parser.add_argument("--model", help="encoder id, one of the supported roster")
    parser.add_argument("--manifest", help="CSV with header sample_id,audio_path")
    parser.add_argument("--out", help="output feature CSV path")
    parser.add_argument("--pooling", default="mean", choices=["mean"])
    parser.add_argument(
        "--checkpoint",
        help="local path or alternate checkpoint to load instead of the roster default"
        " (offline/cache setups)",
    )
    parser.add_argument("--list-models", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_models:
        for model_id, checkpoint in sorted(ROSTER.items()):
            print(f"{model_id}\t{checkpoint}")
        return 0
    if not (args.model and args.manifest and args.out):
        parser.error("--model, --manifest and --out are required")
    try:
        manifest = load_manifest(args.manifest)
        job = ExtractorJob(
            model_id=args.model,
            manifest=manifest,
            output_path=args.out,
            pooling=args.pooling,
            checkpoint_override=args.checkpoint,
        )
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ExtractorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        result = extract(job)
    except (ExtractorError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"{result.output_path}: {result.n_written} rows, dim {result.hidden_size}")
    if result.sidecar_path:
        print(f"{len(result.skipped)} rows skipped, see {result.sidecar_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
