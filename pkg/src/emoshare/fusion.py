"""Prediction matrices and arithmetic-mean late fusion.

Fusion inputs are sorted by source name (ties broken by content) and
summed as a pairwise tree over that order, so the result is bit-identical
no matter how the caller ordered the list.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .tables import EMOTIONS, _load_label_shaped, _open_write

__all__ = ["PredictionMatrix", "fuse_mean", "load_prediction_csv", "save_prediction_csv"]


@dataclass(frozen=True)
class PredictionMatrix:
    """Continuous per-emotion predictions from one model or one fusion."""

    source_name: str
    sample_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        if values.ndim != 2 or values.shape[1] != len(EMOTIONS):
            raise DataError(
                f"prediction matrix {self.source_name!r}: expected shape (n, {len(EMOTIONS)}),"
                f" got {values.shape}"
            )
        if values.shape[0] != len(self.sample_ids):
            raise DataError(
                f"prediction matrix {self.source_name!r}: {len(self.sample_ids)} sample_ids"
                f" but {values.shape[0]} rows"
            )
        if values.size and not np.isfinite(values).all():
            raise DataError(f"prediction matrix {self.source_name!r}: non-finite values")


def fuse_mean(predictions: list[PredictionMatrix]) -> PredictionMatrix:
    """Elementwise arithmetic mean of equally-shaped prediction matrices."""
    if not predictions:
        raise DataError("fuse_mean: need at least one prediction matrix")
    first = predictions[0]
    for other in predictions[1:]:
        if other.sample_ids != first.sample_ids:
            raise DataError(
                f"fuse_mean: sample_ids of {other.source_name!r} do not match"
                f" {first.source_name!r}"
            )
        if other.values.shape != first.values.shape:
            raise DataError(
                f"fuse_mean: shape {other.values.shape} of {other.source_name!r} does not"
                f" match {first.values.shape} of {first.source_name!r}"
            )
    # canonical order: by name, then content, so duplicates stay deterministic
    ordered = sorted(predictions, key=lambda m: (m.source_name, m.values.tobytes()))
    sums = [m.values for m in ordered]
    while len(sums) > 1:
        nxt = [sums[i] + sums[i + 1] for i in range(0, len(sums) - 1, 2)]
        if len(sums) % 2 == 1:
            nxt.append(sums[-1])
        sums = nxt
    fused = sums[0] / float(len(predictions))
    name = "fusion(" + ",".join(m.source_name for m in ordered) + ")"
    return PredictionMatrix(source_name=name, sample_ids=first.sample_ids, values=fused)


def load_prediction_csv(path: str, source_name: str | None = None) -> PredictionMatrix:
    """Read a prediction CSV (same layout as the label CSV, values unbounded)."""
    if source_name is None:
        source_name = Path(path).name
        for suffix in (".gz", ".csv"):
            if source_name.endswith(suffix):
                source_name = source_name[: -len(suffix)]
    ids, values = _load_label_shaped(path, f"predictions {source_name!r}")
    return PredictionMatrix(source_name=source_name, sample_ids=ids, values=values)


def save_prediction_csv(matrix: PredictionMatrix, path: str) -> None:
    with _open_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id"] + list(EMOTIONS))
        for sid, row in zip(matrix.sample_ids, matrix.values):
            writer.writerow([sid] + [repr(float(v)) for v in row])
