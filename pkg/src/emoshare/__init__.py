"""Linear SVR ensembles with late fusion for 9-way emotion-share regression."""

from .errors import DataError, EmoshareError, SolverError, UsageError
from .fusion import PredictionMatrix, fuse_mean
from .grid import GridConfig, GridResult, GridSpec, grid_search, score
from .metrics import EvalReport, evaluate, rank_average, spearman
from .scaling import ScalerParams, fit_scaler, transform
from .svr import (
    LinearModelBundle,
    SvrHyperparams,
    load_bundle,
    predict,
    save_bundle,
    train_bundle,
    train_svr,
)
from .synthetic import SyntheticSpec, generate_synthetic
from .tables import (
    EMOTIONS,
    AlignedDataset,
    FeatureTable,
    LabelTable,
    PartitionMap,
    align,
    load_feature_table,
    load_label_table,
    load_partition_map,
    normalize_label_rows,
)

__version__ = "0.1.0"

__all__ = [
    "AlignedDataset",
    "DataError",
    "EMOTIONS",
    "EmoshareError",
    "EvalReport",
    "FeatureTable",
    "GridConfig",
    "GridResult",
    "GridSpec",
    "LabelTable",
    "LinearModelBundle",
    "PartitionMap",
    "PredictionMatrix",
    "ScalerParams",
    "SolverError",
    "SvrHyperparams",
    "SyntheticSpec",
    "UsageError",
    "align",
    "evaluate",
    "fit_scaler",
    "fuse_mean",
    "generate_synthetic",
    "grid_search",
    "load_bundle",
    "load_feature_table",
    "load_label_table",
    "load_partition_map",
    "normalize_label_rows",
    "predict",
    "rank_average",
    "save_bundle",
    "score",
    "spearman",
    "train_bundle",
    "train_svr",
    "transform",
]
