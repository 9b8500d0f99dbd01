"""Deterministic synthetic fixtures for desk-scale end-to-end runs.

A latent 9-column share matrix plays the role of ground truth; each
simulated upstream model sees a different random linear image of it with
its own noise level, so late fusion has decorrelated errors to average
away.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .tables import EMOTIONS, FeatureTable, LabelTable, PartitionMap


@dataclass(frozen=True)
class SyntheticSpec:
    n_train: int
    n_dev: int
    n_test: int
    n_models: int
    dim: int
    noise_scale: float
    seed: int

    def __post_init__(self) -> None:
        for name in ("n_train", "n_dev", "n_test", "n_models", "dim"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise UsageError(f"synthetic spec: {name} must be a positive integer, got {value!r}")
        if self.noise_scale < 0:
            raise UsageError(f"synthetic spec: noise_scale must be >= 0, got {self.noise_scale!r}")
        if not isinstance(self.seed, int):
            raise UsageError(f"synthetic spec: seed must be an integer, got {self.seed!r}")


def _speakers(split: str, count: int) -> list[str]:
    # one speaker per ~4 samples, assigned round-robin; split-prefixed ids
    # keep the speaker pools disjoint across splits by construction
    pool = max(1, count // 4)
    return [f"spk_{split}_{i % pool:04d}" for i in range(count)]


def generate_synthetic(
    spec: SyntheticSpec,
) -> tuple[list[FeatureTable], LabelTable, PartitionMap]:
    """Draw a reproducible (features, labels, partition) triple.

    Identical specs give bit-identical outputs.  Model m's features are
    `latent @ map_m + eps * noise_scale * (1 + m/10)`, so later models are
    noisier than earlier ones.
    """
    rng = np.random.default_rng(spec.seed)
    total = spec.n_train + spec.n_dev + spec.n_test
    sample_ids = tuple(f"s{i:08d}" for i in range(total))

    latent = rng.uniform(0.0, 1.0, size=(total, len(EMOTIONS)))
    latent /= latent.max(axis=1, keepdims=True)
    labels = LabelTable(sample_ids=sample_ids, values=latent)

    features: list[FeatureTable] = []
    for m in range(spec.n_models):
        mixing = rng.normal(size=(len(EMOTIONS), spec.dim))
        noise = rng.normal(size=(total, spec.dim)) * (spec.noise_scale * (1.0 + m / 10.0))
        values = latent @ mixing + noise
        features.append(
            FeatureTable(model_name=f"synth{m}", sample_ids=sample_ids, values=values)
        )

    assignments: dict[str, tuple[str, str]] = {}
    offset = 0
    for split, count in (("train", spec.n_train), ("dev", spec.n_dev), ("test", spec.n_test)):
        speakers = _speakers(split, count)
        for i in range(count):
            assignments[sample_ids[offset + i]] = (split, speakers[i])
        offset += count
    parts = PartitionMap(assignments=assignments)
    return features, labels, parts
