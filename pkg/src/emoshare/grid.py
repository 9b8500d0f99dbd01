"""Exhaustive hyperparameter grid search scored on the dev split.

The grid is the Cartesian product scaler x dual x C, enumerated with C
descending, and scored with negative mean absolute or squared error on
the development split.  Selection uses that score only; dev Spearman is
recorded per config for reporting but never drives the argmax.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jsonio
from .errors import DataError, SolverError, UsageError
from .fusion import PredictionMatrix
from .metrics import evaluate
from .scaling import SCALER_KINDS
from .svr import LinearModelBundle, SvrHyperparams, train_bundle, predict_matrix
from .tables import LabelTable

GRIDRESULT_FORMAT = "gridresult.v1"

SCORINGS: tuple[str, ...] = ("nmae", "nmse")

DEFAULT_C_GRID: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class GridSpec:
    c_values: tuple[float, ...] = DEFAULT_C_GRID
    dual_options: tuple[bool, ...] = (True, False)
    scaler_kinds: tuple[str, ...] = SCALER_KINDS
    scoring: str = "nmae"

    def __post_init__(self) -> None:
        if not self.c_values:
            raise UsageError("grid: c_values must be non-empty")
        if any(c <= 0 for c in self.c_values):
            raise UsageError(f"grid: C values must be positive, got {self.c_values}")
        if not self.dual_options:
            raise UsageError("grid: dual_options must be non-empty")
        if not self.scaler_kinds:
            raise UsageError("grid: scaler_kinds must be non-empty")
        for kind in self.scaler_kinds:
            if kind not in SCALER_KINDS:
                raise UsageError(f"grid: unknown scaler kind {kind!r}")
        if self.scoring not in SCORINGS:
            raise UsageError(f"grid: scoring must be one of {SCORINGS}, got {self.scoring!r}")

    def configs(self) -> list["GridConfig"]:
        """Enumeration order: scaler, then dual, then C descending."""
        out = []
        for kind in self.scaler_kinds:
            for dual in self.dual_options:
                for c in sorted(self.c_values, reverse=True):
                    out.append(GridConfig(scaler_kind=kind, dual=dual, C=c))
        return out


@dataclass(frozen=True)
class GridConfig:
    scaler_kind: str
    dual: bool
    C: float

    def to_dict(self) -> dict:
        return {"scaler_kind": self.scaler_kind, "dual": bool(self.dual), "C": float(self.C)}


def config_hash(config: GridConfig, hp_base: SvrHyperparams, scoring: str) -> str:
    """Content address for one (config, base hyperparams, scoring) cell."""
    payload = {
        "config": config.to_dict(),
        "hyperparams": hp_base.to_dict(),
        "scoring": scoring,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def score(predictions: np.ndarray, labels: np.ndarray, scoring: str) -> float:
    """Negative mean error over all n*9 cells; higher is better."""
    predictions = np.asarray(predictions, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if predictions.shape != labels.shape:
        raise DataError(f"score: shape mismatch {predictions.shape} vs {labels.shape}")
    if predictions.size == 0:
        raise DataError("score: empty matrices")
    diff = predictions - labels
    if scoring == "nmae":
        return float(-np.mean(np.abs(diff)))
    if scoring == "nmse":
        return float(-np.mean(diff * diff))
    raise UsageError(f"score: scoring must be one of {SCORINGS}, got {scoring!r}")


@dataclass(frozen=True)
class GridEntry:
    config: GridConfig
    dev_score: float
    dev_spearman: float | None
    error: str | None = None


@dataclass(frozen=True)
class GridResult:
    model_name: str
    scoring: str
    entries: tuple[GridEntry, ...]
    best_index: int
    best_bundle: LinearModelBundle

    @property
    def best_config(self) -> GridConfig:
        return self.entries[self.best_index].config


def grid_search(
    model_name: str,
    train_X: np.ndarray,
    train_Y: np.ndarray,
    dev_X: np.ndarray,
    dev_Y: np.ndarray,
    dev_ids: tuple[str, ...],
    grid: GridSpec,
    hp_base: SvrHyperparams,
    load_cached: Callable[[GridConfig], LinearModelBundle | None] | None = None,
    save_cached: Callable[[GridConfig, LinearModelBundle], None] | None = None,
) -> GridResult:
    """Train and score every config; argmax of dev score wins, first on ties.

    A config whose solver fails is recorded with score -inf and the
    search continues; only an all-failure grid raises.
    """
    if train_X.shape[0] == 0 or dev_X.shape[0] == 0:
        raise DataError("grid_search: train and dev splits must be non-empty")
    dev_labels = LabelTable(sample_ids=dev_ids, values=dev_Y)
    entries: list[GridEntry] = []
    bundles: list[LinearModelBundle | None] = []
    for config in grid.configs():
        hp = SvrHyperparams(
            C=config.C,
            dual=config.dual,
            epsilon=hp_base.epsilon,
            max_iter=hp_base.max_iter,
            tol=hp_base.tol,
            seed=hp_base.seed,
        )
        try:
            bundle = load_cached(config) if load_cached is not None else None
            if bundle is None:
                bundle = train_bundle(model_name, train_X, train_Y, config.scaler_kind, hp)
                if save_cached is not None:
                    save_cached(config, bundle)
            dev_pred = predict_matrix(bundle, dev_X)
            dev_score = score(dev_pred, dev_Y, grid.scoring)
            report = evaluate(
                PredictionMatrix(source_name=model_name, sample_ids=dev_ids, values=dev_pred),
                dev_labels,
            )
            entries.append(
                GridEntry(config=config, dev_score=dev_score, dev_spearman=report.mean_rho)
            )
            bundles.append(bundle)
        except SolverError as exc:
            entries.append(
                GridEntry(config=config, dev_score=float("-inf"), dev_spearman=None,
                          error=str(exc))
            )
            bundles.append(None)
    best_index = -1
    best_score = float("-inf")
    for i, entry in enumerate(entries):
        if bundles[i] is not None and entry.dev_score > best_score:
            best_index = i
            best_score = entry.dev_score
    if best_index < 0:
        raise SolverError(f"grid_search: every config failed for model {model_name!r}")
    return GridResult(
        model_name=model_name,
        scoring=grid.scoring,
        entries=tuple(entries),
        best_index=best_index,
        best_bundle=bundles[best_index],
    )


# ---------------------------------------------------------------------------
# Persistence (.gridresult.json)
# ---------------------------------------------------------------------------


def gridresult_to_dict(result: GridResult, hp_base: SvrHyperparams) -> dict:
    return {
        "format": GRIDRESULT_FORMAT,
        "model_name": result.model_name,
        "scoring": result.scoring,
        "hyperparams_base": hp_base.to_dict(),
        "entries": [
            {
                "config": entry.config.to_dict(),
                "config_hash": config_hash(entry.config, hp_base, result.scoring),
                "dev_score": (None if entry.dev_score == float("-inf") else float(entry.dev_score)),
                "dev_spearman": (None if entry.dev_spearman is None else float(entry.dev_spearman)),
                "error": entry.error,
            }
            for entry in result.entries
        ],
        "best_index": int(result.best_index),
        "best_config": result.best_config.to_dict(),
    }


def save_gridresult(result: GridResult, hp_base: SvrHyperparams, path: str) -> None:
    jsonio.dump_file(gridresult_to_dict(result, hp_base), path)
