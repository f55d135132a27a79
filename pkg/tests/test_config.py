import pytest

from seedgraph.citescore import Approach
from seedgraph.config import (
    EvalConfig,
    ExperimentConfig,
    ManifestError,
    ScoringConfig,
    config_from_dict,
    load_manifest,
    save_manifest,
)


class TestDefaults:
    def test_default_criteria(self):
        config = ExperimentConfig()
        assert config.criteria.review_year == 2022
        assert config.criteria.title_pattern == "systematic review"
        assert config.criteria.ref_year_min == 2010
        assert config.criteria.ref_year_max == 2021
        assert config.criteria.min_refs == 30
        assert config.criteria.sample_size == 3000

    def test_default_scoring(self):
        scoring = ScoringConfig()
        assert scoring.weights == (1.0, 0.1, 0.1)
        assert scoring.bc_min_score == 2
        assert scoring.cc_min_score == 2

    def test_default_eval(self):
        eval_config = EvalConfig()
        assert eval_config.n_seeds == 5
        assert eval_config.k_max == 2000
        assert ExperimentConfig().enabled_approaches() == tuple(Approach)

    def test_text_params_bridge(self):
        params = ExperimentConfig().text.params()
        assert (params.title_weight, params.k1, params.b_len) == (2.0, 1.2, 0.75)


class TestRoundTrip:
    def test_json_roundtrip(self, tmp_path):
        config = ExperimentConfig(master_seed=42, workers=3)
        path = tmp_path / "manifest.json"
        save_manifest(config, path)
        assert load_manifest(path) == config

    def test_yaml_manifest(self, tmp_path):
        path = tmp_path / "manifest.yaml"
        path.write_text(
            "manifest_version: 1\n"
            "master_seed: 7\n"
            "eval:\n"
            "  k_max: 100\n"
            "  approaches: [dc, ra]\n"
        )
        config = load_manifest(path)
        assert config.master_seed == 7
        assert config.eval.k_max == 100
        assert config.enabled_approaches() == (Approach.DC, Approach.RA)

    def test_empty_manifest_is_all_defaults(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text("{}")
        assert load_manifest(path) == ExperimentConfig()

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text("{nope")
        with pytest.raises(ManifestError, match="JSON"):
            load_manifest(path)


class TestValidation:
    def test_unknown_top_level_key(self):
        with pytest.raises(ManifestError, match="unknown keys.*typo_here"):
            config_from_dict({"typo_here": 1})

    def test_unknown_nested_key(self):
        with pytest.raises(ManifestError, match="manifest.scoring"):
            config_from_dict({"scoring": {"bc_minimum": 2}})

    def test_version_checked(self):
        with pytest.raises(ManifestError, match="version"):
            config_from_dict({"manifest_version": 99})

    def test_approaches_validated(self):
        with pytest.raises(ValueError, match="unknown approach"):
            config_from_dict({"eval": {"approaches": ["dc", "pagerank"]}})

    def test_workers_validated(self):
        with pytest.raises(ManifestError, match="workers"):
            config_from_dict({"workers": 0})

    def test_k_max_validated(self):
        with pytest.raises(ManifestError, match="k_max"):
            config_from_dict({"eval": {"k_max": 0}})

    def test_non_mapping_section_rejected(self):
        with pytest.raises(ManifestError, match="expected a mapping"):
            config_from_dict({"eval": [1, 2]})

    def test_nested_criteria_parsed(self):
        config = config_from_dict(
            {"criteria": {"review_year": 2020, "min_refs": 10}}
        )
        assert config.criteria.review_year == 2020
        assert config.criteria.min_refs == 10
        assert config.criteria.ref_year_min == 2010  # untouched default
