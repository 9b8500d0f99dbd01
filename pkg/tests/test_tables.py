from __future__ import annotations

import gzip

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from emoshare.errors import DataError
from emoshare.tables import (
    EMOTIONS,
    FeatureTable,
    LabelTable,
    PartitionMap,
    align,
    load_feature_table,
    load_label_table,
    load_partition_map,
    normalize_label_rows,
    save_feature_table,
    save_label_table,
    save_partition_map,
)

LABEL_HEADER = "sample_id," + ",".join(EMOTIONS)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestFeatureLoading:
    def test_basic_parse(self, tmp_path):
        path = write(
            tmp_path / "f.csv",
            "sample_id,f0,f1,f2,f3\n"
            "b,1,2,3,4\n"
            "a,5,6,7,8\n"
            "c,-1,0.5,2e-3,0\n",
        )
        table = load_feature_table(path, "m")
        assert table.dim == 4
        assert table.n_samples == 3
        # canonical order is lexicographic regardless of file order
        assert table.sample_ids == ("a", "b", "c")
        assert table.values[1].tolist() == [1.0, 2.0, 3.0, 4.0]

    def test_gzip_round_trip(self, tmp_path):
        path = tmp_path / "f.csv.gz"
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            fh.write("sample_id,f0\nx,1.5\ny,2.5\n")
        table = load_feature_table(str(path), "m")
        assert table.values[:, 0].tolist() == [1.5, 2.5]
        out = tmp_path / "g.csv.gz"
        save_feature_table(table, str(out))
        again = load_feature_table(str(out), "m")
        assert again.sample_ids == table.sample_ids
        assert np.array_equal(again.values, table.values)

    def test_duplicate_sample_id(self, tmp_path):
        path = write(tmp_path / "f.csv", "sample_id,f0\ns1,1\ns1,2\n")
        with pytest.raises(DataError, match="s1"):
            load_feature_table(path, "m")

    def test_nan_cell_names_position(self, tmp_path):
        path = write(tmp_path / "f.csv", "sample_id,f0,f1\ns1,1,2\ns2,NaN,4\n")
        with pytest.raises(DataError, match=r"row 2.*f0"):
            load_feature_table(path, "m")

    def test_ragged_row(self, tmp_path):
        path = write(tmp_path / "f.csv", "sample_id,f0,f1\ns1,1\n")
        with pytest.raises(DataError, match="row 1"):
            load_feature_table(path, "m")

    def test_bad_header(self, tmp_path):
        path = write(tmp_path / "f.csv", "id,f0\ns1,1\n")
        with pytest.raises(DataError, match="header"):
            load_feature_table(path, "m")

    def test_unparseable_cell(self, tmp_path):
        path = write(tmp_path / "f.csv", "sample_id,f0\ns1,abc\n")
        with pytest.raises(DataError, match="abc"):
            load_feature_table(path, "m")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_feature_table(str(tmp_path / "absent.csv"), "m")


class TestLabelLoading:
    def test_basic_parse(self, tmp_path):
        rows = ["s1," + ",".join(["0.5"] * 9), "s2," + ",".join(["1.0"] * 9)]
        path = write(tmp_path / "l.csv", LABEL_HEADER + "\n" + "\n".join(rows) + "\n")
        table = load_label_table(path)
        assert table.n_samples == 2
        assert table.values.shape == (2, 9)

    def test_missing_emotion_column(self, tmp_path):
        header = "sample_id," + ",".join(EMOTIONS[:-1])
        path = write(tmp_path / "l.csv", header + "\ns1," + ",".join(["0.5"] * 8) + "\n")
        with pytest.raises(DataError, match="header"):
            load_label_table(path)

    def test_wrong_emotion_order(self, tmp_path):
        shuffled = list(EMOTIONS[::-1])
        path = write(
            tmp_path / "l.csv",
            "sample_id," + ",".join(shuffled) + "\ns1," + ",".join(["0.5"] * 9) + "\n",
        )
        with pytest.raises(DataError, match="header"):
            load_label_table(path)

    def test_out_of_range_value(self, tmp_path):
        cells = ["1.3"] + ["0.5"] * 8
        path = write(tmp_path / "l.csv", LABEL_HEADER + "\ns1," + ",".join(cells) + "\n")
        with pytest.raises(DataError, match="Anger"):
            load_label_table(path)


class TestNormalize:
    def test_divides_by_row_max(self):
        values = np.array([[2.0, 4.0, 1.0, 0, 0, 0, 0, 0, 0]])
        table = LabelTable(sample_ids=("s1",), values=values / 4.0)
        normalized = normalize_label_rows(
            LabelTable(sample_ids=("s1",), values=np.array([[0.5, 1.0, 0.25, 0, 0, 0, 0, 0, 0]]) / 2)
        )
        assert normalized.values[0, :3].tolist() == [0.5, 1.0, 0.25]

    def test_already_normalized_unchanged(self):
        values = np.array([[0.5, 1.0, 0.25, 0, 0, 0, 0, 0, 0.1]])
        table = LabelTable(sample_ids=("s1",), values=values)
        assert np.array_equal(normalize_label_rows(table).values, values)

    def test_all_zero_row_rejected(self):
        values = np.zeros((2, 9))
        values[0, 0] = 1.0
        table = LabelTable(sample_ids=("ok", "bad"), values=values)
        with pytest.raises(DataError, match="bad"):
            normalize_label_rows(table)

    @given(
        hnp.arrays(
            np.float64,
            st.tuples(st.integers(1, 8), st.just(9)),
            elements=st.floats(0.0, 1.0, allow_nan=False),
        ).filter(lambda a: (a.max(axis=1) > 1e-6).all())
    )
    def test_idempotent_and_order_preserving(self, values):
        table = LabelTable(sample_ids=tuple(f"s{i}" for i in range(values.shape[0])), values=values)
        once = normalize_label_rows(table)
        twice = normalize_label_rows(once)
        assert np.max(np.abs(twice.values - once.values)) <= 1e-12
        assert np.allclose(once.values.max(axis=1), 1.0, atol=1e-9)
        # within-row ordering preserved, including argmax
        for before, after in zip(values, once.values):
            assert np.array_equal(np.argsort(before, kind="stable"), np.argsort(after, kind="stable"))


class TestPartition:
    def test_speaker_in_two_splits_rejected(self):
        with pytest.raises(DataError, match="spk1"):
            PartitionMap(assignments={"a": ("train", "spk1"), "b": ("dev", "spk1")})

    def test_unknown_split_rejected(self):
        with pytest.raises(DataError, match="valid"):
            PartitionMap(assignments={"a": ("validation", "spk1")})

    def test_duplicate_sample_in_file(self, tmp_path):
        path = write(
            tmp_path / "p.csv",
            "sample_id,split,speaker_id\na,train,spk1\na,dev,spk2\n",
        )
        with pytest.raises(DataError, match="duplicate"):
            load_partition_map(path)

    def test_round_trip(self, tmp_path):
        parts = PartitionMap(
            assignments={"a": ("train", "s1"), "b": ("dev", "s2"), "c": ("test", "s3")}
        )
        path = tmp_path / "p.csv"
        save_partition_map(parts, str(path))
        again = load_partition_map(str(path))
        assert again.assignments == parts.assignments


class TestAlign:
    def _tables(self):
        ids = ("a", "b", "c", "d")
        f1 = FeatureTable(model_name="m1", sample_ids=ids, values=np.arange(8.0).reshape(4, 2))
        f2 = FeatureTable(model_name="m2", sample_ids=ids, values=np.arange(12.0).reshape(4, 3))
        labels = LabelTable(sample_ids=ids, values=np.full((4, 9), 0.5))
        parts = PartitionMap(
            assignments={
                "a": ("train", "sp1"),
                "b": ("train", "sp1"),
                "c": ("dev", "sp2"),
                "d": ("test", "sp3"),
            }
        )
        return [f1, f2], labels, parts

    def test_split_sizes_sum(self):
        features, labels, parts = self._tables()
        aligned = align(features, labels, parts)
        total = sum(len(aligned.view(s).sample_ids) for s in ("train", "dev", "test"))
        assert total == 4
        assert aligned.view("train").sample_ids == ("a", "b")
        assert aligned.view("train").features["m2"].shape == (2, 3)

    def test_rows_line_up(self):
        features, labels, parts = self._tables()
        aligned = align(features, labels, parts)
        train = aligned.view("train")
        assert train.features["m1"][1].tolist() == [2.0, 3.0]  # row for "b"

    def test_missing_sample_named(self):
        features, labels, parts = self._tables()
        short = FeatureTable(
            model_name="m1", sample_ids=("a", "b", "c"), values=np.zeros((3, 2))
        )
        with pytest.raises(DataError, match="'d'"):
            align([short, features[1]], labels, parts)

    def test_extra_sample_rejected(self):
        features, labels, parts = self._tables()
        extra = FeatureTable(
            model_name="m1", sample_ids=("a", "b", "c", "d", "e"), values=np.zeros((5, 2))
        )
        with pytest.raises(DataError, match="'e'"):
            align([extra, features[1]], labels, parts)

    def test_sample_multiset_preserved(self):
        features, labels, parts = self._tables()
        aligned = align(features, labels, parts)
        collected = sorted(
            sid for s in ("train", "dev", "test") for sid in aligned.view(s).sample_ids
        )
        assert collected == sorted(labels.sample_ids)


class TestRoundTrip:
    @given(
        values=hnp.arrays(
            np.float64,
            st.tuples(st.integers(1, 6), st.integers(1, 5)),
            elements=st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
        )
    )
    def test_feature_csv_round_trip(self, tmp_path_factory, values):
        tmp = tmp_path_factory.mktemp("rt")
        ids = tuple(f"s{i:03d}" for i in range(values.shape[0]))
        table = FeatureTable(model_name="m", sample_ids=ids, values=values)
        path = tmp / "f.csv"
        save_feature_table(table, str(path))
        again = load_feature_table(str(path), "m")
        assert again.sample_ids == table.sample_ids
        assert np.array_equal(again.values, table.values)
        # serialize -> parse -> serialize is byte-stable
        path2 = tmp / "g.csv"
        save_feature_table(again, str(path2))
        assert path.read_bytes() == path2.read_bytes()

    def test_label_csv_round_trip(self, tmp_path, rng):
        values = rng.uniform(0.0, 1.0, size=(7, 9))
        table = LabelTable(sample_ids=tuple(f"s{i}" for i in range(7)), values=values)
        path = tmp_path / "l.csv"
        save_label_table(table, str(path))
        again = load_label_table(str(path))
        assert np.array_equal(again.values, table.values)
