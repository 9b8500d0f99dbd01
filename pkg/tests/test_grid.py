from __future__ import annotations

import numpy as np
import pytest

import emoshare.grid as grid_mod
from emoshare.errors import DataError, SolverError, UsageError
from emoshare.grid import (
    DEFAULT_C_GRID,
    GridConfig,
    GridSpec,
    config_hash,
    grid_search,
    gridresult_to_dict,
    score,
)
from emoshare.svr import SvrHyperparams

HP = SvrHyperparams(C=1.0, dual=True, max_iter=20000, tol=1e-8)


def _search(aligned, name, grid, hp=HP, **kw):
    train = aligned.view("train")
    dev = aligned.view("dev")
    return grid_search(
        model_name=name,
        train_X=train.features[name],
        train_Y=train.labels,
        dev_X=dev.features[name],
        dev_Y=dev.labels,
        dev_ids=dev.sample_ids,
        grid=grid,
        hp_base=hp,
        **kw,
    )


class TestScore:
    def test_identity_scores_zero(self, rng):
        values = rng.uniform(size=(10, 9))
        assert score(values, values, "nmae") == 0.0
        assert score(values, values, "nmse") == 0.0

    def test_constant_offset(self, rng):
        labels = rng.uniform(size=(8, 9))
        preds = labels + 0.5
        assert score(preds, labels, "nmae") == pytest.approx(-0.5, abs=1e-12)
        assert score(preds, labels, "nmse") == pytest.approx(-0.25, abs=1e-12)

    def test_single_cell(self):
        preds = np.full((1, 1), 0.2)
        labels = np.full((1, 1), 0.6)
        assert score(preds, labels, "nmae") == pytest.approx(-0.4, abs=1e-15)
        assert score(preds, labels, "nmse") == pytest.approx(-0.16, abs=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(DataError):
            score(np.ones((2, 9)), np.ones((3, 9)), "nmae")

    def test_unknown_scoring(self):
        with pytest.raises(UsageError):
            score(np.ones((1, 9)), np.ones((1, 9)), "rmse")


class TestGridSpec:
    def test_full_grid_is_twenty_configs(self):
        spec = GridSpec(scoring="nmae")
        configs = spec.configs()
        assert len(configs) == 20
        assert len(set((c.scaler_kind, c.dual, c.C) for c in configs)) == 20

    def test_enumeration_order(self):
        spec = GridSpec(c_values=(1e-3, 1e-2), dual_options=(True, False),
                        scaler_kinds=("standard", "minmax"), scoring="nmae")
        configs = spec.configs()
        assert configs[0] == GridConfig("standard", True, 1e-2)
        assert configs[1] == GridConfig("standard", True, 1e-3)
        assert configs[2] == GridConfig("standard", False, 1e-2)
        assert configs[4] == GridConfig("minmax", True, 1e-2)

    def test_validation(self):
        with pytest.raises(UsageError):
            GridSpec(c_values=())
        with pytest.raises(UsageError):
            GridSpec(c_values=(0.0,))
        with pytest.raises(UsageError):
            GridSpec(scoring="accuracy")
        with pytest.raises(UsageError):
            GridSpec(scaler_kinds=("robust",))


class TestGridSearch:
    def test_single_config_is_best(self, tiny_dataset):
        _, _, _, aligned = tiny_dataset
        name = aligned.model_names[0]
        spec = GridSpec(c_values=(1e-2,), dual_options=(True,),
                        scaler_kinds=("standard",), scoring="nmae")
        result = _search(aligned, name, spec)
        assert len(result.entries) == 1
        assert result.best_index == 0
        assert result.best_config == GridConfig("standard", True, 1e-2)

    def test_adequate_c_beats_vanishing_c(self, noiseless_dataset):
        _, _, _, aligned = noiseless_dataset
        name = aligned.model_names[0]
        spec = GridSpec(c_values=(1e-2, 1e-12), dual_options=(True,),
                        scaler_kinds=("standard",), scoring="nmae")
        result = _search(aligned, name, spec)
        assert result.best_config.C == 1e-2

    def test_argmax_invariance(self, tiny_dataset):
        _, _, _, aligned = tiny_dataset
        name = aligned.model_names[0]
        result = _search(aligned, name, GridSpec(scoring="nmse"))
        scores = [e.dev_score for e in result.entries]
        assert int(np.argmax(scores)) == result.best_index
        # selection is ordinal: shifting every score keeps the argmax
        assert int(np.argmax([s + 3.7 for s in scores])) == result.best_index

    def test_selection_uses_score_not_spearman(self, tiny_dataset):
        _, _, _, aligned = tiny_dataset
        name = aligned.model_names[0]
        result = _search(aligned, name, GridSpec(scoring="nmae"))
        best = result.entries[result.best_index]
        assert best.dev_score == max(e.dev_score for e in result.entries)

    def test_deterministic_serialization(self, tiny_dataset):
        _, _, _, aligned = tiny_dataset
        name = aligned.model_names[0]
        spec = GridSpec(c_values=(1e-2, 1e-4), scoring="nmae")
        d1 = gridresult_to_dict(_search(aligned, name, spec), HP)
        d2 = gridresult_to_dict(_search(aligned, name, spec), HP)
        assert d1 == d2

    def test_cache_callables_skip_training(self, tiny_dataset):
        _, _, _, aligned = tiny_dataset
        name = aligned.model_names[0]
        spec = GridSpec(c_values=(1e-2, 1e-3), dual_options=(True,),
                        scaler_kinds=("standard",), scoring="nmae")
        stored = {}
        result1 = _search(
            aligned, name, spec,
            load_cached=lambda cfg: None,
            save_cached=lambda cfg, bundle: stored.__setitem__(cfg, bundle),
        )
        assert len(stored) == 2
        trained = []
        original = grid_mod.train_bundle

        def counting(*args, **kw):
            trained.append(1)
            return original(*args, **kw)

        grid_mod.train_bundle, saved = counting, grid_mod.train_bundle
        try:
            result2 = _search(aligned, name, spec, load_cached=stored.get)
        finally:
            grid_mod.train_bundle = saved
        assert not trained  # everything came from the cache
        assert gridresult_to_dict(result1, HP) == gridresult_to_dict(result2, HP)

    def test_failing_config_recorded_and_skipped(self, tiny_dataset, monkeypatch):
        _, _, _, aligned = tiny_dataset
        name = aligned.model_names[0]
        spec = GridSpec(c_values=(1e-2, 1e-3), dual_options=(True,),
                        scaler_kinds=("standard",), scoring="nmae")
        original = grid_mod.train_bundle

        def flaky(model_name, X, Y, scaler_kind, hp):
            if hp.C == 1e-2:
                raise SolverError("injected failure")
            return original(model_name, X, Y, scaler_kind, hp)

        monkeypatch.setattr(grid_mod, "train_bundle", flaky)
        result = _search(aligned, name, spec)
        assert result.entries[0].dev_score == float("-inf")
        assert result.entries[0].error == "injected failure"
        assert result.best_config.C == 1e-3

    def test_all_failing_raises(self, tiny_dataset, monkeypatch):
        _, _, _, aligned = tiny_dataset
        name = aligned.model_names[0]

        def broken(*args, **kw):
            raise SolverError("boom")

        monkeypatch.setattr(grid_mod, "train_bundle", broken)
        with pytest.raises(SolverError, match="every config failed"):
            _search(aligned, name, GridSpec(c_values=(1e-2,), scoring="nmae"))

    def test_empty_split_rejected(self, tiny_dataset):
        _, _, _, aligned = tiny_dataset
        name = aligned.model_names[0]
        train = aligned.view("train")
        with pytest.raises(DataError):
            grid_search(
                model_name=name,
                train_X=train.features[name][:0],
                train_Y=train.labels[:0],
                dev_X=train.features[name],
                dev_Y=train.labels,
                dev_ids=train.sample_ids,
                grid=GridSpec(scoring="nmae"),
                hp_base=HP,
            )


class TestConfigHash:
    def test_stable_and_distinct(self):
        a = config_hash(GridConfig("standard", True, 1e-2), HP, "nmae")
        b = config_hash(GridConfig("standard", True, 1e-2), HP, "nmae")
        c = config_hash(GridConfig("standard", True, 1e-3), HP, "nmae")
        d = config_hash(GridConfig("standard", True, 1e-2), HP, "nmse")
        assert a == b
        assert len({a, c, d}) == 3

    def test_c_grid_default_is_decades(self):
        assert DEFAULT_C_GRID == (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
