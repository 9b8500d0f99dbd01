from __future__ import annotations

import numpy as np
import pytest

from emoshare.synthetic import SyntheticSpec, generate_synthetic
from emoshare.tables import align


@pytest.fixture(scope="session")
def tiny_dataset():
    """Two-model noisy fixture shared by tests that just need aligned data."""
    spec = SyntheticSpec(n_train=60, n_dev=24, n_test=24, n_models=2, dim=10,
                         noise_scale=0.2, seed=1234)
    features, labels, parts = generate_synthetic(spec)
    return features, labels, parts, align(features, labels, parts)


@pytest.fixture(scope="session")
def noiseless_dataset():
    """Single-model noiseless fixture; features are an exact linear image."""
    spec = SyntheticSpec(n_train=200, n_dev=80, n_test=40, n_models=1, dim=16,
                         noise_scale=0.0, seed=42)
    features, labels, parts = generate_synthetic(spec)
    return features, labels, parts, align(features, labels, parts)


@pytest.fixture
def rng():
    return np.random.default_rng(97531)
