"""Spearman rank correlation with fractional ties, and evaluation reports.

rho is computed as the Pearson correlation of average-ranked data, which
handles ties correctly; the 1 - 6*sum(d^2)/(n(n^2-1)) shortcut only
agrees in the tie-free case and is used as a cross-check in the tests.
A constant vector has zero rank variance, so its rho is undefined; in
aggregate reports that maps to 0.0 with a warning instead of aborting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DataError
from .fusion import PredictionMatrix
from .tables import EMOTIONS, LabelTable


def rank_average(x: np.ndarray) -> np.ndarray:
    """Fractional (average) ranks, 1-based; ties share the mean position."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 1:
        raise DataError(f"rank_average: need a non-empty 1-D vector, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise DataError("rank_average: non-finite values")
    n = x.shape[0]
    order = np.argsort(x, kind="stable")
    sorted_vals = x[order]
    starts = np.concatenate(([0], np.flatnonzero(sorted_vals[1:] != sorted_vals[:-1]) + 1))
    ends = np.concatenate((starts[1:], [n]))
    ranks_sorted = np.empty(n, dtype=np.float64)
    for s, e in zip(starts, ends):
        ranks_sorted[s:e] = 0.5 * (s + e - 1) + 1.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = ranks_sorted
    return ranks


def spearman(x: np.ndarray, y: np.ndarray) -> float | None:
    """Spearman's rho; None when either rank vector is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DataError(f"spearman: shape mismatch {x.shape} vs {y.shape}")
    if x.ndim != 1 or x.shape[0] < 2:
        raise DataError(f"spearman: need vectors of length >= 2, got shape {x.shape}")
    rx = rank_average(x)
    ry = rank_average(y)
    ax = rx - rx.mean()
    ay = ry - ry.mean()
    sx = float(np.dot(ax, ax))
    sy = float(np.dot(ay, ay))
    if sx == 0.0 or sy == 0.0:
        return None
    return float(np.dot(ax, ay) / np.sqrt(sx * sy))


@dataclass(frozen=True)
class EvalReport:
    """Per-emotion and mean Spearman rho for one prediction source."""

    source_name: str
    per_emotion: tuple[tuple[str, float | None], ...]
    mean_rho: float
    n_samples: int
    warnings: tuple[str, ...]
    provenance: Mapping[str, object] = field(default_factory=dict)


def evaluate(
    pred: PredictionMatrix,
    labels: LabelTable,
    provenance: Mapping[str, object] | None = None,
) -> EvalReport:
    """Column-wise Spearman rho of predictions against labels.

    Requires identical sample ids in identical (canonical) order; an
    undefined rho contributes 0.0 to the mean and adds a warning.
    """
    if pred.sample_ids != labels.sample_ids:
        missing = sorted(set(labels.sample_ids) - set(pred.sample_ids))
        extra = sorted(set(pred.sample_ids) - set(labels.sample_ids))
        if missing or extra:
            raise DataError(
                f"evaluate: sample ids of {pred.source_name!r} do not match labels"
                f" (missing {missing[:5]}, unexpected {extra[:5]})"
            )
        raise DataError(f"evaluate: sample id order of {pred.source_name!r} is not canonical")
    n = len(pred.sample_ids)
    if n < 2:
        raise DataError(f"evaluate: need at least 2 samples, got {n}")
    per_emotion: list[tuple[str, float | None]] = []
    warnings: list[str] = []
    total = 0.0
    for j, emotion in enumerate(EMOTIONS):
        rho = spearman(pred.values[:, j], labels.values[:, j])
        per_emotion.append((emotion, rho))
        if rho is None:
            warnings.append(f"{emotion}: correlation undefined (constant ranks), scored 0.0")
        else:
            total += rho
    return EvalReport(
        source_name=pred.source_name,
        per_emotion=tuple(per_emotion),
        mean_rho=total / len(EMOTIONS),
        n_samples=n,
        warnings=tuple(warnings),
        provenance=dict(provenance or {}),
    )


def report_to_dict(report: EvalReport) -> dict:
    return {
        "source_name": report.source_name,
        "n_samples": int(report.n_samples),
        "per_emotion": [
            {"emotion": name, "rho": (None if rho is None else float(rho))}
            for name, rho in report.per_emotion
        ],
        "mean_rho": float(report.mean_rho),
        "warnings": list(report.warnings),
        "provenance": dict(report.provenance),
    }


def report_from_dict(data: dict) -> EvalReport:
    per_emotion = tuple(
        (entry["emotion"], None if entry["rho"] is None else float(entry["rho"]))
        for entry in data["per_emotion"]
    )
    if tuple(name for name, _ in per_emotion) != EMOTIONS:
        raise DataError("eval report: per_emotion entries must follow the canonical order")
    return EvalReport(
        source_name=data["source_name"],
        per_emotion=per_emotion,
        mean_rho=float(data["mean_rho"]),
        n_samples=int(data["n_samples"]),
        warnings=tuple(data.get("warnings", ())),
        provenance=dict(data.get("provenance", {})),
    )


# ---------------------------------------------------------------------------
# Plain-text tables
# ---------------------------------------------------------------------------


def format_emotion_table(report: EvalReport) -> str:
    """Emotion rows x rho column, like the per-emotion breakdown tables."""
    width = max(len(name) for name, _ in report.per_emotion)
    lines = [f"Source: {report.source_name}  (n={report.n_samples})"]
    lines.append(f"{'Emotion':<{width}}  Spearman rho")
    for name, rho in report.per_emotion:
        shown = "undefined" if rho is None else f"{rho:.4f}"
        lines.append(f"{name:<{width}}  {shown}")
    lines.append(f"{'Mean':<{width}}  {report.mean_rho:.4f}")
    return "\n".join(lines) + "\n"


def format_model_table(rows: list[tuple[str, Mapping[str, float | None]]], scorings: list[str]) -> str:
    """Model rows x per-scoring mean-rho columns, fusion rows included."""
    name_width = max([len("Model")] + [len(name) for name, _ in rows])
    header = f"{'Model':<{name_width}}" + "".join(f"  {s.upper():>8}" for s in scorings)
    lines = [header]
    for name, scores in rows:
        cells = []
        for s in scorings:
            value = scores.get(s)
            cells.append(f"  {'-':>8}" if value is None else f"  {value:>8.4f}")
        lines.append(f"{name:<{name_width}}" + "".join(cells))
    return "\n".join(lines) + "\n"
