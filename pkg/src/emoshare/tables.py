"""Core data tables: embedding features, emotion-share labels, split partitions.

All tables are immutable after construction (backing arrays are marked
read-only) and keep their rows in the canonical order, which is
lexicographic by sample_id.  Loaders sort their rows into that order, so
every downstream matrix lines up row-by-row regardless of file ordering.
"""

from __future__ import annotations

import csv
import gzip
import io
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DataError

EMOTIONS: tuple[str, ...] = (
    "Anger",
    "Boredom",
    "Calmness",
    "Concentration",
    "Determination",
    "Excitement",
    "Interest",
    "Sadness",
    "Tiredness",
)

SPLITS: tuple[str, ...] = ("train", "dev", "test")

_LABEL_SLACK = 1e-9


def _freeze(values: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(values, dtype=np.float64)
    out.setflags(write=False)
    return out


def _check_ids(sample_ids: tuple[str, ...], context: str) -> None:
    seen: set[str] = set()
    for sid in sample_ids:
        if not sid:
            raise DataError(f"{context}: empty sample_id")
        if sid in seen:
            raise DataError(f"{context}: duplicate sample_id {sid!r}")
        seen.add(sid)


@dataclass(frozen=True)
class FeatureTable:
    """Dense per-sample embedding matrix from one upstream model."""

    model_name: str
    sample_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = _freeze(self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        ctx = f"feature table {self.model_name!r}"
        _check_ids(self.sample_ids, ctx)
        if values.ndim != 2:
            raise DataError(f"{ctx}: values must be 2-D, got shape {values.shape}")
        if values.shape[0] != len(self.sample_ids):
            raise DataError(
                f"{ctx}: {len(self.sample_ids)} sample_ids but {values.shape[0]} rows"
            )
        if values.shape[1] < 1:
            raise DataError(f"{ctx}: feature dimension must be positive")
        if values.size and not np.isfinite(values).all():
            row, col = np.argwhere(~np.isfinite(values))[0]
            raise DataError(
                f"{ctx}: non-finite value at row {row} (sample {self.sample_ids[row]!r}),"
                f" column f{col}"
            )

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    @property
    def n_samples(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class LabelTable:
    """Per-sample emotion shares over the nine canonical categories."""

    sample_ids: tuple[str, ...]
    values: np.ndarray
    emotions: tuple[str, ...] = EMOTIONS

    def __post_init__(self) -> None:
        if tuple(self.emotions) != EMOTIONS:
            raise DataError(
                f"label table: emotion columns must be {list(EMOTIONS)}, got {list(self.emotions)}"
            )
        values = _freeze(self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        object.__setattr__(self, "emotions", tuple(self.emotions))
        _check_ids(self.sample_ids, "label table")
        if values.ndim != 2 or values.shape[1] != len(EMOTIONS):
            raise DataError(
                f"label table: expected shape (n, {len(EMOTIONS)}), got {values.shape}"
            )
        if values.shape[0] != len(self.sample_ids):
            raise DataError(
                f"label table: {len(self.sample_ids)} sample_ids but {values.shape[0]} rows"
            )
        if values.size:
            if not np.isfinite(values).all():
                row, col = np.argwhere(~np.isfinite(values))[0]
                raise DataError(
                    f"label table: non-finite value at sample {self.sample_ids[row]!r},"
                    f" column {EMOTIONS[col]}"
                )
            bad = (values < -_LABEL_SLACK) | (values > 1.0 + _LABEL_SLACK)
            if bad.any():
                row, col = np.argwhere(bad)[0]
                raise DataError(
                    f"label table: value {values[row, col]!r} out of [0, 1] at sample"
                    f" {self.sample_ids[row]!r}, column {EMOTIONS[col]}"
                )

    @property
    def n_samples(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class PartitionMap:
    """sample_id -> (split, speaker_id), speaker-disjoint across splits."""

    assignments: Mapping[str, tuple[str, str]]

    def __post_init__(self) -> None:
        assignments = dict(self.assignments)
        object.__setattr__(self, "assignments", assignments)
        speaker_split: dict[str, str] = {}
        for sid, (split, speaker) in assignments.items():
            if split not in SPLITS:
                raise DataError(
                    f"partition: sample {sid!r} has split {split!r}, expected one of {list(SPLITS)}"
                )
            if not speaker:
                raise DataError(f"partition: sample {sid!r} has empty speaker_id")
            prev = speaker_split.get(speaker)
            if prev is None:
                speaker_split[speaker] = split
            elif prev != split:
                raise DataError(
                    f"partition: speaker {speaker!r} appears in both {prev!r} and {split!r}"
                )

    def split_of(self, sample_id: str) -> str:
        return self.assignments[sample_id][0]

    def ids_for_split(self, split: str) -> tuple[str, ...]:
        if split not in SPLITS:
            raise DataError(f"unknown split {split!r}, expected one of {list(SPLITS)}")
        return tuple(sorted(sid for sid, (s, _) in self.assignments.items() if s == split))


@dataclass(frozen=True)
class SplitView:
    """Row-aligned matrices for one split: features per model plus labels."""

    sample_ids: tuple[str, ...]
    features: Mapping[str, np.ndarray]
    labels: np.ndarray


@dataclass(frozen=True)
class AlignedDataset:
    """Per-split views where row i means the same sample everywhere."""

    splits: Mapping[str, SplitView]
    model_names: tuple[str, ...]

    def view(self, split: str) -> SplitView:
        if split not in self.splits:
            raise DataError(f"unknown split {split!r}")
        return self.splits[split]


# ---------------------------------------------------------------------------
# CSV I/O
# ---------------------------------------------------------------------------


def _open_read(path: str) -> io.TextIOBase:
    if str(path).endswith(".gz"):
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8", newline="")
    return open(path, "r", encoding="utf-8", newline="")


def _open_write(path: str) -> io.TextIOBase:
    if str(path).endswith(".gz"):
        # fixed mtime/no filename so compressed output is byte-reproducible
        raw = gzip.GzipFile(filename="", mode="wb", fileobj=open(path, "wb"), mtime=0)
        return io.TextIOWrapper(raw, encoding="utf-8", newline="")
    return open(path, "w", encoding="utf-8", newline="")


def _read_rows(path: str, context: str) -> tuple[list[str], list[list[str]]]:
    try:
        with _open_read(path) as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{context}: {path}: file is empty") from None
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"{context}: cannot read {path}: {exc}") from exc
    return header, rows


def _parse_float(cell: str, context: str, row_no: int, col_name: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(
            f"{context}: unparseable value {cell!r} at data row {row_no}, column {col_name}"
        ) from None
    if not np.isfinite(value):
        raise DataError(
            f"{context}: non-finite value {cell!r} at data row {row_no}, column {col_name}"
        )
    return value


def _sort_rows(ids: list[str], matrix: np.ndarray) -> tuple[tuple[str, ...], np.ndarray]:
    order = sorted(range(len(ids)), key=lambda i: ids[i])
    return tuple(ids[i] for i in order), matrix[order] if len(ids) else matrix


def load_feature_table(path: str, model_name: str) -> FeatureTable:
    """Load a feature CSV (`sample_id,f0,...`); `.gz` paths are gunzipped.

    Rows are sorted into canonical (lexicographic) sample order.
    """
    ctx = f"feature table {model_name!r}"
    header, rows = _read_rows(path, ctx)
    if len(header) < 2 or header[0] != "sample_id":
        raise DataError(f"{ctx}: {path}: header must start with 'sample_id' and one feature column")
    dim = len(header) - 1
    expected = [f"f{i}" for i in range(dim)]
    if header[1:] != expected:
        raise DataError(
            f"{ctx}: {path}: feature columns must be f0..f{dim - 1} in order, got {header[1:]}"
        )
    ids: list[str] = []
    data = np.empty((len(rows), dim), dtype=np.float64)
    for r, row in enumerate(rows, start=1):
        if len(row) != dim + 1:
            raise DataError(
                f"{ctx}: {path}: data row {r} has {len(row)} cells, expected {dim + 1}"
            )
        ids.append(row[0])
        for c, cell in enumerate(row[1:]):
            data[r - 1, c] = _parse_float(cell, ctx, r, f"f{c}")
    ids_sorted, data_sorted = _sort_rows(ids, data)
    return FeatureTable(model_name=model_name, sample_ids=ids_sorted, values=data_sorted)


def save_feature_table(table: FeatureTable, path: str) -> None:
    with _open_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id"] + [f"f{i}" for i in range(table.dim)])
        for sid, row in zip(table.sample_ids, table.values):
            writer.writerow([sid] + [repr(float(v)) for v in row])


def _load_label_shaped(path: str, context: str) -> tuple[tuple[str, ...], np.ndarray]:
    header, rows = _read_rows(path, context)
    expected = ["sample_id"] + list(EMOTIONS)
    if header != expected:
        raise DataError(f"{context}: {path}: header must be {expected}, got {header}")
    ids: list[str] = []
    data = np.empty((len(rows), len(EMOTIONS)), dtype=np.float64)
    for r, row in enumerate(rows, start=1):
        if len(row) != len(expected):
            raise DataError(
                f"{context}: {path}: data row {r} has {len(row)} cells, expected {len(expected)}"
            )
        ids.append(row[0])
        for c, cell in enumerate(row[1:]):
            data[r - 1, c] = _parse_float(cell, context, r, EMOTIONS[c])
    return _sort_rows(ids, data)


def load_label_table(path: str) -> LabelTable:
    """Load a label CSV with the nine canonical emotion columns.

    Values are range-checked against [0, 1] but not normalized; call
    :func:`normalize_label_rows` explicitly for that.
    """
    ids, data = _load_label_shaped(path, "label table")
    return LabelTable(sample_ids=ids, values=data)


def save_label_table(table: LabelTable, path: str) -> None:
    with _open_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id"] + list(EMOTIONS))
        for sid, row in zip(table.sample_ids, table.values):
            writer.writerow([sid] + [repr(float(v)) for v in row])


def load_partition_map(path: str) -> PartitionMap:
    header, rows = _read_rows(path, "partition")
    expected = ["sample_id", "split", "speaker_id"]
    if header != expected:
        raise DataError(f"partition: {path}: header must be {expected}, got {header}")
    assignments: dict[str, tuple[str, str]] = {}
    for r, row in enumerate(rows, start=1):
        if len(row) != 3:
            raise DataError(f"partition: {path}: data row {r} has {len(row)} cells, expected 3")
        sid, split, speaker = row
        if sid in assignments:
            raise DataError(f"partition: {path}: duplicate sample_id {sid!r} at data row {r}")
        assignments[sid] = (split, speaker)
    return PartitionMap(assignments=assignments)


def save_partition_map(parts: PartitionMap, path: str) -> None:
    with _open_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id", "split", "speaker_id"])
        for sid in sorted(parts.assignments):
            split, speaker = parts.assignments[sid]
            writer.writerow([sid, split, speaker])


# ---------------------------------------------------------------------------
# Transformations
# ---------------------------------------------------------------------------


def normalize_label_rows(table: LabelTable) -> LabelTable:
    """Divide each row by its maximum so the top emotion scores exactly 1.0.

    Idempotent, and preserves the within-row ordering of values.  Rows
    whose maximum is not positive are data corruption and rejected.
    """
    values = table.values
    if values.shape[0] == 0:
        return table
    row_max = values.max(axis=1)
    zero = np.flatnonzero(row_max <= 0.0)
    if zero.size:
        raise DataError(
            f"cannot normalize label row with no positive value, sample"
            f" {table.sample_ids[zero[0]]!r}"
        )
    return LabelTable(sample_ids=table.sample_ids, values=values / row_max[:, None])


def align(
    features: Iterable[FeatureTable],
    labels: LabelTable,
    parts: PartitionMap,
) -> AlignedDataset:
    """Build per-split, row-aligned views over every table.

    Every table must cover exactly the partition's sample universe; rows
    come out in canonical (lexicographic) order per split.
    """
    features = list(features)
    if not features:
        raise DataError("align: need at least one feature table")
    universe = set(parts.assignments)
    names = [t.model_name for t in features]
    if len(set(names)) != len(names):
        raise DataError(f"align: duplicate model names {names}")

    def check_cover(ids: tuple[str, ...], what: str) -> dict[str, int]:
        idset = set(ids)
        missing = sorted(universe - idset)
        if missing:
            raise DataError(f"align: {what} is missing sample_ids {missing}")
        extra = sorted(idset - universe)
        if extra:
            raise DataError(f"align: {what} has sample_ids not in partition: {extra}")
        return {sid: i for i, sid in enumerate(ids)}

    label_index = check_cover(labels.sample_ids, "label table")
    feature_indexes = [
        check_cover(t.sample_ids, f"feature table {t.model_name!r}") for t in features
    ]

    views: dict[str, SplitView] = {}
    for split in SPLITS:
        ids = parts.ids_for_split(split)
        lab_rows = np.array([label_index[sid] for sid in ids], dtype=np.intp)
        feats = {}
        for table, index in zip(features, feature_indexes):
            rows = np.array([index[sid] for sid in ids], dtype=np.intp)
            feats[table.model_name] = _freeze(table.values[rows])
        views[split] = SplitView(
            sample_ids=ids,
            features=feats,
            labels=_freeze(labels.values[lab_rows]),
        )
    return AlignedDataset(splits=views, model_names=tuple(names))
