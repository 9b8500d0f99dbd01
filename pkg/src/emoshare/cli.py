"""Command-line entry point wiring the pipeline together.

Subcommands: synth, grid, predict, fuse, evaluate, report.  Exit codes:
0 success, 2 usage/validation error, 3 data error, 4 numerical/solver
error.  All artifacts are written deterministically, so re-running a
command on identical inputs reproduces identical bytes.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import jsonio
from .errors import DataError, EmoshareError, SolverError, UsageError
from .fusion import fuse_mean, load_prediction_csv, save_prediction_csv
from .grid import (
    DEFAULT_C_GRID,
    GridSpec,
    SCORINGS,
    config_hash,
    grid_search,
    save_gridresult,
)
from .metrics import (
    EvalReport,
    evaluate,
    format_emotion_table,
    format_model_table,
    report_from_dict,
    report_to_dict,
)
from .scaling import SCALER_KINDS
from .svr import (
    DEFAULT_SEED,
    SvrHyperparams,
    load_bundle,
    predict,
    save_bundle,
)
from .synthetic import SyntheticSpec, generate_synthetic
from .tables import (
    FeatureTable,
    LabelTable,
    align,
    load_feature_table,
    load_label_table,
    load_partition_map,
    normalize_label_rows,
    save_feature_table,
    save_label_table,
    save_partition_map,
    SPLITS,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_SOLVER = 4


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


def _parse_feature_args(pairs: list[str]) -> dict[str, str]:
    features: dict[str, str] = {}
    for pair in pairs:
        name, sep, path = pair.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"--features expects NAME=PATH, got {pair!r}")
        if name in features:
            raise UsageError(f"--features: duplicate model name {name!r}")
        features[name] = path
    return features


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = jsonio.load_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must contain a JSON object")
    return data


def _effective(args: argparse.Namespace, config: dict, key: str, default=None):
    """CLI flag wins over config-file value wins over default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        n_train=args.train,
        n_dev=args.dev,
        n_test=args.test,
        n_models=args.models,
        dim=args.dim,
        noise_scale=args.noise,
        seed=args.seed,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    features, labels, parts = generate_synthetic(spec)
    written: list[Path] = []
    for table in features:
        path = out_dir / f"features_{_safe_name(table.model_name)}.csv"
        save_feature_table(table, str(path))
        written.append(path)
    labels_path = out_dir / "labels.csv"
    save_label_table(labels, str(labels_path))
    written.append(labels_path)
    parts_path = out_dir / "partition.csv"
    save_partition_map(parts, str(parts_path))
    written.append(parts_path)
    for path in written:
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------


def _load_dataset(
    feature_paths: dict[str, str], label_path: str, partition_path: str, normalize: bool
):
    features = [load_feature_table(path, name) for name, path in sorted(feature_paths.items())]
    labels = load_label_table(label_path)
    if normalize:
        labels = normalize_label_rows(labels)
    parts = load_partition_map(partition_path)
    return features, labels, parts, align(features, labels, parts)


def cmd_grid(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    feature_pairs = args.features if args.features else None
    if feature_pairs is not None:
        feature_paths = _parse_feature_args(feature_pairs)
    elif "features" in config:
        feature_paths = dict(config["features"])
    else:
        raise UsageError("grid: at least one --features NAME=PATH is required")
    if not feature_paths:
        raise UsageError("grid: at least one feature table is required")
    label_path = _effective(args, config, "labels")
    partition_path = _effective(args, config, "partition")
    out_dir_arg = _effective(args, config, "out")
    for flag, value in (("--labels", label_path), ("--partition", partition_path), ("--out", out_dir_arg)):
        if value is None:
            raise UsageError(f"grid: {flag} is required")
    scoring_arg = _effective(args, config, "scoring", "both")
    if scoring_arg not in SCORINGS + ("both",):
        raise UsageError(f"grid: --scoring must be one of {SCORINGS + ('both',)}, got {scoring_arg!r}")
    scorings = list(SCORINGS) if scoring_arg == "both" else [scoring_arg]
    c_grid_arg = _effective(args, config, "c_grid")
    if c_grid_arg is None:
        c_values = DEFAULT_C_GRID
    elif isinstance(c_grid_arg, str):
        try:
            c_values = tuple(float(v) for v in c_grid_arg.split(",") if v)
        except ValueError:
            raise UsageError(f"grid: cannot parse --c-grid {c_grid_arg!r}") from None
    else:
        c_values = tuple(float(v) for v in c_grid_arg)
    scaler_kinds = tuple(_effective(args, config, "scalers", list(SCALER_KINDS)))
    dual_options = tuple(bool(v) for v in _effective(args, config, "dual_options", [True, False]))
    normalize = bool(_effective(args, config, "normalize_labels", False))
    hp_base = SvrHyperparams(
        C=1.0,  # placeholder; the grid overrides C per config
        dual=True,
        epsilon=float(_effective(args, config, "epsilon", 0.0)),
        max_iter=int(_effective(args, config, "max_iter", 50000)),
        tol=float(_effective(args, config, "tol", 1e-4)),
        seed=int(_effective(args, config, "seed", DEFAULT_SEED)),
    )

    sanitized = {name: _safe_name(name) for name in feature_paths}
    if len(set(sanitized.values())) != len(sanitized):
        raise UsageError(f"grid: model names collide after sanitization: {sorted(feature_paths)}")

    out_dir = Path(out_dir_arg)
    out_dir.mkdir(parents=True, exist_ok=True)
    effective = {
        "command": "grid",
        "features": {name: str(path) for name, path in sorted(feature_paths.items())},
        "labels": str(label_path),
        "partition": str(partition_path),
        "out": str(out_dir_arg),
        "scoring": scoring_arg,
        "c_grid": [float(v) for v in c_values],
        "scalers": list(scaler_kinds),
        "dual_options": [bool(v) for v in dual_options],
        "normalize_labels": normalize,
        "epsilon": hp_base.epsilon,
        "max_iter": hp_base.max_iter,
        "tol": hp_base.tol,
        "seed": hp_base.seed,
    }
    jsonio.dump_file(effective, str(out_dir / "effective_config.json"))

    _, _, _, aligned = _load_dataset(feature_paths, label_path, partition_path, normalize)
    train = aligned.view("train")
    dev = aligned.view("dev")
    dev_labels = LabelTable(sample_ids=dev.sample_ids, values=dev.labels)

    for name in sorted(feature_paths):
        for scoring in scorings:
            grid = GridSpec(
                c_values=c_values,
                dual_options=dual_options,
                scaler_kinds=scaler_kinds,
                scoring=scoring,
            )
            cache_dir = out_dir / "cache" / sanitized[name] / scoring
            cache_dir.mkdir(parents=True, exist_ok=True)

            def cache_path(cfg) -> Path:
                return cache_dir / f"{config_hash(cfg, hp_base, scoring)}.svrbundle.json"

            def load_cached(cfg):
                path = cache_path(cfg)
                if path.exists():
                    return load_bundle(str(path))
                return None

            def save_cached(cfg, bundle) -> None:
                save_bundle(bundle, str(cache_path(cfg)))

            result = grid_search(
                model_name=name,
                train_X=train.features[name],
                train_Y=train.labels,
                dev_X=dev.features[name],
                dev_Y=dev.labels,
                dev_ids=dev.sample_ids,
                grid=grid,
                hp_base=hp_base,
                load_cached=load_cached,
                save_cached=save_cached,
            )
            stem = f"{sanitized[name]}.{scoring}"
            save_gridresult(result, hp_base, str(out_dir / f"{stem}.gridresult.json"))
            save_bundle(result.best_bundle, str(out_dir / f"{stem}.best.svrbundle.json"))
            dev_pred = predict(
                result.best_bundle,
                FeatureTable(model_name=name, sample_ids=dev.sample_ids, values=dev.features[name]),
            )
            save_prediction_csv(dev_pred, str(out_dir / f"{stem}.dev_predictions.csv"))
            report = evaluate(
                dev_pred,
                dev_labels,
                provenance={
                    "split": "dev",
                    "scoring": scoring,
                    "model": name,
                    "config": result.best_config.to_dict(),
                },
            )
            jsonio.dump_file(report_to_dict(report), str(out_dir / f"{stem}.dev.evalreport.json"))
            best = result.best_config
            print(
                f"{name} [{scoring}] best: scaler={best.scaler_kind} dual={best.dual}"
                f" C={best.C:g} dev_score={result.entries[result.best_index].dev_score:.6f}"
                f" dev_rho={result.entries[result.best_index].dev_spearman:.4f}"
            )
    return EXIT_OK


# ---------------------------------------------------------------------------
# predict / fuse / evaluate / report
# ---------------------------------------------------------------------------


def _select_split_rows(table_ids: tuple[str, ...], values, parts, split: str):
    wanted = parts.ids_for_split(split)
    index = {sid: i for i, sid in enumerate(table_ids)}
    missing = sorted(set(wanted) - set(table_ids))
    if missing:
        raise DataError(f"split {split!r}: table is missing sample_ids {missing[:5]}")
    rows = [index[sid] for sid in wanted]
    return wanted, values[rows]


def cmd_predict(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.bundle)
    table = load_feature_table(args.features, bundle.model_name)
    if args.split != "all":
        if args.partition is None:
            raise UsageError("predict: --partition is required unless --split all")
        parts = load_partition_map(args.partition)
        ids, values = _select_split_rows(table.sample_ids, table.values, parts, args.split)
        table = FeatureTable(model_name=bundle.model_name, sample_ids=ids, values=values)
    matrix = predict(bundle, table)
    save_prediction_csv(matrix, args.out)
    print(args.out)
    return EXIT_OK


def cmd_fuse(args: argparse.Namespace) -> int:
    matrices = [load_prediction_csv(path) for path in args.predictions]
    fused = fuse_mean(matrices)
    save_prediction_csv(fused, args.out)
    print(args.out)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    pred = load_prediction_csv(args.predictions, source_name=args.source_name)
    labels = load_label_table(args.labels)
    if args.normalize_labels:
        labels = normalize_label_rows(labels)
    if args.split != "all":
        if args.partition is None:
            raise UsageError("evaluate: --partition is required unless --split all")
        parts = load_partition_map(args.partition)
        ids, values = _select_split_rows(labels.sample_ids, labels.values, parts, args.split)
        labels = LabelTable(sample_ids=ids, values=values)
    provenance: dict[str, object] = {"split": args.split}
    if args.scoring is not None:
        provenance["scoring"] = args.scoring
    report = evaluate(pred, labels, provenance=provenance)
    if args.out_json:
        jsonio.dump_file(report_to_dict(report), args.out_json)
    text = format_emotion_table(report)
    if args.out_table:
        Path(args.out_table).write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        raise DataError(f"report: {run_dir} is not a directory")
    paths = sorted(run_dir.rglob("*.evalreport.json"))
    if not paths:
        raise DataError(f"report: no runs found in {run_dir}")
    reports = [report_from_dict(jsonio.load_file(str(p))) for p in paths]

    def scoring_of(report: EvalReport) -> str:
        value = report.provenance.get("scoring")
        return value if value in SCORINGS else "-"

    rows: dict[str, dict[str, float]] = {}
    for report in reports:
        rows.setdefault(report.source_name, {})[scoring_of(report)] = report.mean_rho
    scorings = [s for s in SCORINGS if any(s in scores for scores in rows.values())]
    if not scorings:
        scorings = ["-"]
    model_rows = sorted(
        (name, scores) for name, scores in rows.items() if not name.startswith("fusion(")
    )
    fusion_rows = sorted(
        (name, scores) for name, scores in rows.items() if name.startswith("fusion(")
    )
    lines = [format_model_table(model_rows + fusion_rows, scorings)]
    for report in sorted(reports, key=lambda r: (scoring_of(r), r.source_name)):
        if report.source_name.startswith("fusion("):
            lines.append("")
            lines.append(f"[{scoring_of(report)}] " + format_emotion_table(report))
    text = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emoshare",
        description="Linear SVR ensembles with late fusion for 9-way emotion-share regression.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a deterministic synthetic dataset")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--models", type=int, default=3)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--train", type=int, default=200)
    p.add_argument("--dev", type=int, default=80)
    p.add_argument("--test", type=int, default=80)
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("grid", help="hyperparameter grid search per model and scoring")
    p.add_argument("--config", help="JSON config file; CLI flags override its values")
    p.add_argument("--features", action="append", metavar="NAME=PATH")
    p.add_argument("--labels")
    p.add_argument("--partition")
    p.add_argument("--out")
    p.add_argument("--scoring", choices=list(SCORINGS) + ["both"])
    p.add_argument("--c-grid", dest="c_grid", help="comma-separated C values")
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--normalize-labels", dest="normalize_labels", action="store_const", const=True)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("predict", help="apply a trained bundle to a feature table")
    p.add_argument("--bundle", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--partition")
    p.add_argument("--split", choices=list(SPLITS) + ["all"], default="all")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("fuse", help="arithmetic-mean fusion of prediction CSVs")
    p.add_argument("predictions", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("evaluate", help="Spearman evaluation of predictions against labels")
    p.add_argument("--predictions", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--partition")
    p.add_argument("--split", choices=list(SPLITS) + ["all"], default="all")
    p.add_argument("--source-name", dest="source_name")
    p.add_argument("--scoring", choices=list(SCORINGS), help="tag the report for `emoshare report`")
    p.add_argument("--normalize-labels", dest="normalize_labels", action="store_true")
    p.add_argument("--out-json", dest="out_json")
    p.add_argument("--out-table", dest="out_table")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="consolidated model x scoring table for a run directory")
    p.add_argument("--run-dir", dest="run_dir", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except EmoshareError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
