from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emoshare.errors import DataError
from emoshare.fusion import PredictionMatrix
from emoshare.metrics import (
    evaluate,
    format_emotion_table,
    rank_average,
    report_from_dict,
    report_to_dict,
    spearman,
)
from emoshare.tables import EMOTIONS, LabelTable

# ---------------------------------------------------------------------------
# independent oracle: explicit sort-based ranks + textbook two-pass Pearson
# ---------------------------------------------------------------------------


def oracle_ranks(values):
    n = len(values)
    pairs = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[pairs[j + 1]] == values[pairs[i]]:
            j += 1
        mean_rank = sum(range(i + 1, j + 2)) / (j - i + 1)
        for k in range(i, j + 1):
            ranks[pairs[k]] = mean_rank
        i = j + 1
    return ranks


def oracle_pearson(a, b):
    n = len(a)
    mean_a = sum(a) / n
    mean_b = sum(b) / n
    cov = sum((x - mean_a) * (y - mean_b) for x, y in zip(a, b))
    var_a = sum((x - mean_a) ** 2 for x in a)
    var_b = sum((y - mean_b) ** 2 for y in b)
    if var_a == 0.0 or var_b == 0.0:
        return None
    return cov / (var_a * var_b) ** 0.5


def oracle_spearman(x, y):
    return oracle_pearson(oracle_ranks(x), oracle_ranks(y))


GRID_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)

grid_vector = st.lists(st.sampled_from(GRID_VALUES), min_size=2, max_size=7)


class TestRankAverage:
    def test_strict_order(self):
        assert rank_average(np.array([10.0, 20.0, 30.0])).tolist() == [1.0, 2.0, 3.0]

    def test_ties_share_mean_rank(self):
        assert rank_average(np.array([5.0, 5.0, 9.0])).tolist() == [1.5, 1.5, 3.0]

    def test_singleton(self):
        assert rank_average(np.array([7.0])).tolist() == [1.0]

    def test_all_tied(self):
        assert rank_average(np.array([3.0, 3.0, 3.0, 3.0])).tolist() == [2.5] * 4

    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            rank_average(np.array([1.0, np.nan]))

    @given(grid_vector)
    def test_matches_oracle(self, values):
        got = rank_average(np.array(values))
        assert got.tolist() == oracle_ranks(values)


class TestSpearman:
    def test_perfect_monotone(self):
        x = np.array([0.1, 0.5, 2.0, 7.0])
        assert spearman(x, x * 3.0 + 1.0) == 1.0

    def test_perfect_inversion(self):
        x = np.array([0.1, 0.5, 2.0, 7.0])
        assert spearman(x, -x) == -1.0

    def test_partial_agreement_against_oracle(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        y = [2.0, 1.0, 4.0, 3.0, 5.0]
        expected = oracle_spearman(x, y)
        # no ties: d^2 = 4, so 1 - 6*4/(5*24) = 0.8 analytically
        assert expected == pytest.approx(0.8, abs=1e-15)
        assert spearman(np.array(x), np.array(y)) == pytest.approx(expected, abs=1e-12)

    def test_constant_vector_is_undefined(self):
        assert spearman(np.array([1.0, 2.0, 3.0]), np.array([4.0, 4.0, 4.0])) is None

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            spearman(np.array([1.0, 2.0]), np.array([1.0, 2.0, 3.0]))

    def test_too_short(self):
        with pytest.raises(DataError):
            spearman(np.array([1.0]), np.array([2.0]))

    @given(grid_vector, grid_vector)
    def test_symmetry_and_range(self, x, y):
        n = min(len(x), len(y))
        x, y = np.array(x[:n]), np.array(y[:n])
        rho_xy = spearman(x, y)
        rho_yx = spearman(y, x)
        if rho_xy is None:
            assert rho_yx is None
        else:
            assert rho_xy == rho_yx
            assert -1.0 - 1e-12 <= rho_xy <= 1.0 + 1e-12

    @given(grid_vector, grid_vector)
    def test_monotone_invariance(self, x, y):
        n = min(len(x), len(y))
        x, y = np.array(x[:n]), np.array(y[:n])
        rho = spearman(x, y)
        assert spearman(2.0 * x + 1.0, y) == rho
        assert spearman(np.exp(x), y) == rho

    @given(grid_vector, grid_vector)
    def test_matches_oracle(self, x, y):
        n = min(len(x), len(y))
        x, y = x[:n], y[:n]
        expected = oracle_spearman(x, y)
        got = spearman(np.array(x), np.array(y))
        if expected is None:
            assert got is None
        else:
            assert got == pytest.approx(expected, abs=1e-12)

    @settings(deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_scipy_on_continuous_data(self, seed):
        from scipy.stats import spearmanr

        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 40))
        x = rng.normal(size=n)
        y = rng.normal(size=n)
        assert spearman(x, y) == pytest.approx(spearmanr(x, y).statistic, abs=1e-12)


def _prediction(values, name="model"):
    ids = tuple(f"s{i}" for i in range(values.shape[0]))
    return PredictionMatrix(source_name=name, sample_ids=ids, values=values), LabelTable(
        sample_ids=ids, values=np.clip(values, 0.0, 1.0)
    )


class TestEvaluate:
    def test_identity_predictions_score_one(self, rng):
        values = rng.uniform(0.01, 0.99, size=(20, 9))
        pred, labels = _prediction(values)
        report = evaluate(pred, labels)
        assert all(rho == 1.0 for _, rho in report.per_emotion)
        assert report.mean_rho == 1.0
        assert report.warnings == ()

    def test_constant_column_contributes_zero(self, rng):
        values = rng.uniform(0.01, 0.99, size=(12, 9))
        constant = values.copy()
        constant[:, 0] = 0.5
        ids = tuple(f"s{i}" for i in range(12))
        pred = PredictionMatrix(source_name="m", sample_ids=ids, values=constant)
        labels = LabelTable(sample_ids=ids, values=values)
        report = evaluate(pred, labels)
        assert report.per_emotion[0] == ("Anger", None)
        assert report.mean_rho == pytest.approx(8.0 / 9.0, abs=1e-12)
        assert len(report.warnings) == 1 and "Anger" in report.warnings[0]

    def test_mismatched_ids_raise(self, rng):
        values = rng.uniform(0.0, 1.0, size=(5, 9))
        pred, labels = _prediction(values)
        bad = PredictionMatrix(
            source_name="m", sample_ids=tuple(f"t{i}" for i in range(5)), values=values
        )
        with pytest.raises(DataError):
            evaluate(bad, labels)

    def test_non_canonical_order_raises(self, rng):
        values = rng.uniform(0.01, 0.99, size=(4, 9))
        ids = ("s0", "s1", "s2", "s3")
        labels = LabelTable(sample_ids=ids, values=values)
        shuffled = PredictionMatrix(
            source_name="m", sample_ids=ids[::-1], values=values[::-1]
        )
        with pytest.raises(DataError):
            evaluate(shuffled, labels)

    def test_report_json_round_trip(self, rng):
        values = rng.uniform(0.01, 0.99, size=(10, 9))
        pred, labels = _prediction(values)
        report = evaluate(pred, labels, provenance={"split": "dev", "scoring": "nmae"})
        assert report_from_dict(report_to_dict(report)) == report

    def test_emotion_table_lists_all_emotions(self, rng):
        values = rng.uniform(0.01, 0.99, size=(10, 9))
        pred, labels = _prediction(values)
        text = format_emotion_table(evaluate(pred, labels))
        for emotion in EMOTIONS:
            assert emotion in text
        assert "Mean" in text
