"""Per-emotion linear epsilon-insensitive SVR training and prediction.

One independent regressor is trained per emotion column.  The intercept
is fitted through an appended constant feature of 1.0 and is regularized
with the weights, which keeps the dual and primal paths structurally
identical.  Training is deterministic: identical inputs, hyperparameters,
and seed give bit-identical weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jsonio
from .errors import DataError, SolverError, UsageError
from .fusion import PredictionMatrix
from .scaling import SCALER_KINDS, ScalerParams, fit_scaler, transform
from .solver_kernels import dual_cd_train, primal_objective, primal_sgd_train
from .tables import EMOTIONS, FeatureTable

BUNDLE_FORMAT = "svrbundle.v1"
DEFAULT_SEED = 20230815


@dataclass(frozen=True)
class SvrHyperparams:
    C: float
    dual: bool
    epsilon: float = 0.0
    max_iter: int = 50000
    tol: float = 1e-4
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise UsageError(f"hyperparams: C must be > 0, got {self.C!r}")
        if self.epsilon < 0:
            raise UsageError(f"hyperparams: epsilon must be >= 0, got {self.epsilon!r}")
        if self.max_iter < 1:
            raise UsageError(f"hyperparams: max_iter must be >= 1, got {self.max_iter!r}")
        if not self.tol > 0:
            raise UsageError(f"hyperparams: tol must be > 0, got {self.tol!r}")

    def to_dict(self) -> dict:
        return {
            "C": float(self.C),
            "dual": bool(self.dual),
            "epsilon": float(self.epsilon),
            "max_iter": int(self.max_iter),
            "tol": float(self.tol),
            "seed": int(self.seed),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SvrHyperparams":
        return cls(
            C=float(data["C"]),
            dual=bool(data["dual"]),
            epsilon=float(data["epsilon"]),
            max_iter=int(data["max_iter"]),
            tol=float(data["tol"]),
            seed=int(data["seed"]),
        )


@dataclass(frozen=True)
class TrainMeta:
    """Outcome of one solver run.

    objective is the primal objective F at the returned weights for both
    paths, so runs are comparable across paths.  trace is the path-native
    per-epoch objective: primal F (non-increasing) on the primal path,
    dual objective (non-decreasing) on the dual path.
    """

    objective: float
    epochs: int
    trace: np.ndarray


def _augment(X: np.ndarray) -> np.ndarray:
    Xa = np.empty((X.shape[0], X.shape[1] + 1), dtype=np.float64)
    Xa[:, :-1] = X
    Xa[:, -1] = 1.0
    return Xa


def train_svr(
    X: np.ndarray,
    y: np.ndarray,
    hp: SvrHyperparams,
    record_trace: bool = True,
) -> tuple[np.ndarray, float, TrainMeta]:
    """Train one regressor on an already-scaled matrix; returns (w, b, meta)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise DataError(f"train_svr: X must be 2-D with at least one row, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise DataError(f"train_svr: y has shape {y.shape}, X has {X.shape[0]} rows")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise DataError("train_svr: inputs contain non-finite values")
    Xa = _augment(X)
    if hp.dual:
        seed = np.uint64(hp.seed & 0xFFFFFFFFFFFFFFFF)
        v, epochs, trace, ok = dual_cd_train(
            Xa, y, float(hp.C), float(hp.epsilon), int(hp.max_iter), float(hp.tol), seed,
            bool(record_trace),
        )
    else:
        v, epochs, trace, ok = primal_sgd_train(
            Xa, y, float(hp.C), float(hp.epsilon), int(hp.max_iter), float(hp.tol),
            bool(record_trace),
        )
    if not ok or not np.isfinite(v).all():
        path = "dual" if hp.dual else "primal"
        raise SolverError(f"train_svr: {path} path diverged to non-finite values")
    objective = float(primal_objective(Xa, y, v, float(hp.C), float(hp.epsilon)))
    meta = TrainMeta(objective=objective, epochs=int(epochs), trace=np.asarray(trace))
    return v[:-1].copy(), float(v[-1]), meta


@dataclass(frozen=True)
class LinearModelBundle:
    """Nine fitted linear regressors plus the scaler that feeds them."""

    model_name: str
    scaler: ScalerParams
    weights: np.ndarray  # (9, D) in canonical emotion order
    intercepts: np.ndarray  # (9,)
    hyperparams: SvrHyperparams
    feature_dim: int
    n_train: int
    objectives: tuple[float, ...]
    iterations: tuple[int, ...]

    def __post_init__(self) -> None:
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        intercepts = np.ascontiguousarray(self.intercepts, dtype=np.float64)
        weights.setflags(write=False)
        intercepts.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "intercepts", intercepts)
        if weights.shape != (len(EMOTIONS), self.feature_dim):
            raise DataError(
                f"bundle {self.model_name!r}: weights shape {weights.shape}, expected"
                f" ({len(EMOTIONS)}, {self.feature_dim})"
            )
        if intercepts.shape != (len(EMOTIONS),):
            raise DataError(f"bundle {self.model_name!r}: need {len(EMOTIONS)} intercepts")
        if not np.isfinite(weights).all() or not np.isfinite(intercepts).all():
            raise DataError(f"bundle {self.model_name!r}: non-finite parameters")
        if self.scaler.dim != self.feature_dim:
            raise DataError(
                f"bundle {self.model_name!r}: scaler dim {self.scaler.dim} != feature dim"
                f" {self.feature_dim}"
            )


def train_bundle(
    model_name: str,
    train_X: np.ndarray,
    train_Y: np.ndarray,
    scaler_kind: str,
    hp: SvrHyperparams,
) -> LinearModelBundle:
    """Fit the scaler on the training rows, then nine independent SVRs."""
    train_X = np.asarray(train_X, dtype=np.float64)
    train_Y = np.asarray(train_Y, dtype=np.float64)
    if train_Y.ndim != 2 or train_Y.shape[1] != len(EMOTIONS):
        raise DataError(f"train_bundle: labels must be (n, {len(EMOTIONS)}), got {train_Y.shape}")
    if train_X.shape[0] != train_Y.shape[0]:
        raise DataError(
            f"train_bundle: {train_X.shape[0]} feature rows vs {train_Y.shape[0]} label rows"
        )
    if scaler_kind not in SCALER_KINDS:
        raise UsageError(f"unknown scaler kind {scaler_kind!r}, expected one of {SCALER_KINDS}")
    scaler = fit_scaler(scaler_kind, train_X)
    Xs = transform(scaler, train_X)
    dim = train_X.shape[1]
    weights = np.empty((len(EMOTIONS), dim), dtype=np.float64)
    intercepts = np.empty(len(EMOTIONS), dtype=np.float64)
    objectives: list[float] = []
    iterations: list[int] = []
    for j in range(len(EMOTIONS)):
        w, b, meta = train_svr(Xs, train_Y[:, j], hp, record_trace=False)
        weights[j] = w
        intercepts[j] = b
        objectives.append(meta.objective)
        iterations.append(meta.epochs)
    return LinearModelBundle(
        model_name=model_name,
        scaler=scaler,
        weights=weights,
        intercepts=intercepts,
        hyperparams=hp,
        feature_dim=dim,
        n_train=int(train_X.shape[0]),
        objectives=tuple(objectives),
        iterations=tuple(iterations),
    )


def predict_matrix(bundle: LinearModelBundle, X: np.ndarray) -> np.ndarray:
    """Raw continuous predictions (n, 9); no clipping, no re-normalization."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != bundle.feature_dim:
        raise DataError(
            f"predict: matrix has shape {X.shape}, bundle expects (n, {bundle.feature_dim})"
        )
    Xs = transform(bundle.scaler, X)
    return Xs @ bundle.weights.T + bundle.intercepts


def predict(bundle: LinearModelBundle, features: FeatureTable) -> PredictionMatrix:
    values = predict_matrix(bundle, features.values)
    return PredictionMatrix(
        source_name=bundle.model_name,
        sample_ids=features.sample_ids,
        values=values,
    )


# ---------------------------------------------------------------------------
# Bundle persistence (.svrbundle.json)
# ---------------------------------------------------------------------------


def bundle_to_dict(bundle: LinearModelBundle) -> dict:
    return {
        "format": BUNDLE_FORMAT,
        "model_name": bundle.model_name,
        "feature_dim": int(bundle.feature_dim),
        "hyperparams": bundle.hyperparams.to_dict(),
        "scaler": bundle.scaler.to_dict(),
        "per_emotion": [
            {
                "emotion": emotion,
                "weights": [float(v) for v in bundle.weights[j]],
                "intercept": float(bundle.intercepts[j]),
            }
            for j, emotion in enumerate(EMOTIONS)
        ],
        "training_meta": {
            "n_train": int(bundle.n_train),
            "objective_value": [float(v) for v in bundle.objectives],
            "iterations_used": [int(v) for v in bundle.iterations],
        },
    }


def bundle_from_dict(data: dict) -> LinearModelBundle:
    if data.get("format") != BUNDLE_FORMAT:
        raise DataError(f"bundle: unknown format {data.get('format')!r}")
    per_emotion = data["per_emotion"]
    if [e["emotion"] for e in per_emotion] != list(EMOTIONS):
        raise DataError("bundle: per_emotion entries must follow the canonical emotion order")
    weights = np.array([e["weights"] for e in per_emotion], dtype=np.float64)
    intercepts = np.array([e["intercept"] for e in per_emotion], dtype=np.float64)
    meta = data["training_meta"]
    return LinearModelBundle(
        model_name=data["model_name"],
        scaler=ScalerParams.from_dict(data["scaler"]),
        weights=weights,
        intercepts=intercepts,
        hyperparams=SvrHyperparams.from_dict(data["hyperparams"]),
        feature_dim=int(data["feature_dim"]),
        n_train=int(meta["n_train"]),
        objectives=tuple(float(v) for v in meta["objective_value"]),
        iterations=tuple(int(v) for v in meta["iterations_used"]),
    )


def save_bundle(bundle: LinearModelBundle, path: str) -> None:
    jsonio.dump_file(bundle_to_dict(bundle), path)


def load_bundle(path: str) -> LinearModelBundle:
    try:
        data = jsonio.load_file(path)
    except OSError as exc:
        raise DataError(f"bundle: cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"bundle: invalid JSON in {path}: {exc}") from exc
    return bundle_from_dict(data)
