"""Train-fitted feature scalers: standardization and min-max.

Statistics always come from the training split alone and are then
applied to every split.  Dev/test values may leave [0, 1] under min-max
scaling; they are deliberately not clipped, because clipping would
destroy the rank information the downstream Spearman metric consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

SCALER_KINDS: tuple[str, ...] = ("standard", "minmax")

# divisor below this is treated as 1.0 so constant columns map to 0
# instead of propagating NaN into the solver
_DEGENERATE = 1e-12


@dataclass(frozen=True)
class ScalerParams:
    """Fitted per-column statistics for one scaler kind."""

    kind: str
    dim: int
    mean: np.ndarray | None = None
    stddev: np.ndarray | None = None
    minimum: np.ndarray | None = None
    maximum: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in SCALER_KINDS:
            raise DataError(f"unknown scaler kind {self.kind!r}, expected one of {SCALER_KINDS}")
        stats = (
            (self.mean, self.stddev) if self.kind == "standard" else (self.minimum, self.maximum)
        )
        for arr in stats:
            if arr is None or arr.shape != (self.dim,):
                raise DataError(f"scaler params for kind {self.kind!r}: need length-{self.dim} stats")
        if self.kind == "standard" and np.any(self.stddev < 0):
            raise DataError("scaler params: negative stddev")
        if self.kind == "minmax" and np.any(self.maximum < self.minimum):
            raise DataError("scaler params: max < min")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "dim": self.dim}
        if self.kind == "standard":
            out["mean"] = [float(v) for v in self.mean]
            out["stddev"] = [float(v) for v in self.stddev]
        else:
            out["min"] = [float(v) for v in self.minimum]
            out["max"] = [float(v) for v in self.maximum]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScalerParams":
        kind = data["kind"]
        dim = int(data["dim"])
        if kind == "standard":
            return cls(
                kind=kind,
                dim=dim,
                mean=np.asarray(data["mean"], dtype=np.float64),
                stddev=np.asarray(data["stddev"], dtype=np.float64),
            )
        return cls(
            kind=kind,
            dim=dim,
            minimum=np.asarray(data["min"], dtype=np.float64),
            maximum=np.asarray(data["max"], dtype=np.float64),
        )


def fit_scaler(kind: str, train_matrix: np.ndarray) -> ScalerParams:
    """Fit per-column statistics on the training matrix.

    Standardization uses the population stddev (divisor n).
    """
    X = np.asarray(train_matrix, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError(f"fit_scaler: need a non-empty 2-D matrix, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise DataError("fit_scaler: matrix contains non-finite values")
    if kind == "standard":
        return ScalerParams(kind=kind, dim=X.shape[1], mean=X.mean(axis=0), stddev=X.std(axis=0))
    if kind == "minmax":
        return ScalerParams(kind=kind, dim=X.shape[1], minimum=X.min(axis=0), maximum=X.max(axis=0))
    raise DataError(f"unknown scaler kind {kind!r}, expected one of {SCALER_KINDS}")


def transform(params: ScalerParams, matrix: np.ndarray) -> np.ndarray:
    X = np.asarray(matrix, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != params.dim:
        raise DataError(
            f"transform: matrix has shape {X.shape}, expected (n, {params.dim})"
        )
    if params.kind == "standard":
        denom = np.where(params.stddev < _DEGENERATE, 1.0, params.stddev)
        return (X - params.mean) / denom
    span = params.maximum - params.minimum
    denom = np.where(span < _DEGENERATE, 1.0, span)
    return (X - params.minimum) / denom
