"""Run a pre-trained speech encoder over an audio manifest.

Each audio file is resampled to 16 kHz mono, pushed through the
checkpoint in eval mode, and the final hidden states are mean-pooled
over time into one feature row.  The output CSV follows the emoshare
feature-table format (`sample_id,f0,...`), with the dimension equal to
the checkpoint's configured hidden size.

Undecodable audio does not abort the run: the row is skipped with a
warning and enumerated in a `<out>.errors.csv` sidecar.  Inference is
sequential, one sample at a time, one model in memory; padding-based
batching would perturb the numerics and the per-row determinism.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

from .audio import read_audio
from .errors import AudioError, ExtractorError, ManifestError
from .roster import ROSTER

logger = logging.getLogger(__name__)

POOLINGS = ("mean",)


@dataclass(frozen=True)
class ExtractorJob:
    model_id: str
    manifest: tuple[tuple[str, str], ...]  # (sample_id, audio_path) pairs
    output_path: str
    pooling: str = "mean"
    target_sample_rate: int = 16000
    checkpoint_override: str | None = None

    def __post_init__(self) -> None:
        if self.model_id not in ROSTER:
            raise ExtractorError(
                f"unknown model_id {self.model_id!r}; supported: {sorted(ROSTER)}"
            )
        if self.pooling not in POOLINGS:
            raise ExtractorError(f"unsupported pooling {self.pooling!r}; supported: {POOLINGS}")
        seen: set[str] = set()
        for sid, _ in self.manifest:
            if not sid:
                raise ManifestError("manifest: empty sample_id")
            if sid in seen:
                raise ManifestError(f"manifest: duplicate sample_id {sid!r}")
            seen.add(sid)


@dataclass(frozen=True)
class ExtractResult:
    output_path: str
    hidden_size: int
    n_written: int
    skipped: tuple[tuple[str, str, str], ...]  # (sample_id, audio_path, error)
    sidecar_path: str | None


def load_manifest(path: str) -> tuple[tuple[str, str], ...]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ManifestError(f"manifest {path}: file is empty") from None
            if header != ["sample_id", "audio_path"]:
                raise ManifestError(
                    f"manifest {path}: header must be ['sample_id', 'audio_path'], got {header}"
                )
            rows = []
            for r, row in enumerate(reader, start=1):
                if len(row) != 2:
                    raise ManifestError(f"manifest {path}: data row {r} has {len(row)} cells")
                rows.append((row[0], row[1]))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    return tuple(rows)


def _load_encoder(source: str):
    # imported lazily so `--list-models` and manifest validation stay cheap
    import torch
    from transformers import AutoFeatureExtractor, AutoModel

    model = AutoModel.from_pretrained(source)
    model.eval()
    try:
        feature_extractor = AutoFeatureExtractor.from_pretrained(source)
    except Exception:  # checkpoint without a preprocessor config
        from transformers import Wav2Vec2FeatureExtractor

        logger.warning("%s has no preprocessor config; using Wav2Vec2 defaults", source)
        feature_extractor = Wav2Vec2FeatureExtractor()
    return torch, model, feature_extractor


def extract(job: ExtractorJob) -> ExtractResult:
    """Write one pooled feature row per decodable manifest entry."""
    source = job.checkpoint_override or ROSTER[job.model_id]
    torch, model, feature_extractor = _load_encoder(source)
    hidden_size = int(model.config.hidden_size)

    skipped: list[tuple[str, str, str]] = []
    n_written = 0
    with open(job.output_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id"] + [f"f{i}" for i in range(hidden_size)])
        for sample_id, audio_path in job.manifest:
            try:
                wave = read_audio(audio_path, job.target_sample_rate)
            except AudioError as exc:
                logger.warning("skipping %s: %s", sample_id, exc)
                skipped.append((sample_id, audio_path, str(exc)))
                continue
            inputs = feature_extractor(
                wave, sampling_rate=job.target_sample_rate, return_tensors="pt"
            )
            with torch.no_grad():
                hidden = model(**inputs).last_hidden_state
            pooled = hidden.mean(dim=1).squeeze(0).numpy()
            writer.writerow([sample_id] + [repr(float(v)) for v in pooled])
            n_written += 1

    sidecar_path = None
    if skipped:
        sidecar_path = job.output_path + ".errors.csv"
        with open(sidecar_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["sample_id", "audio_path", "error"])
            writer.writerows(skipped)
    return ExtractResult(
        output_path=job.output_path,
        hidden_size=hidden_size,
        n_written=n_written,
        skipped=tuple(skipped),
        sidecar_path=sidecar_path,
    )
