import json

import numpy as np
import pytest

from countycluster.cluster import adjusted_rand_index
from countycluster.pipeline import RunConfig, run_analysis, run_ingest


def test_config_defaults_and_validation():
    config = RunConfig()
    assert config.column_threshold == 0.5
    assert config.row_threshold == 0.25
    assert config.variance_target == 0.90
    assert (config.k_min, config.k_max) == (2, 20)
    assert config.restarts == 10
    with pytest.raises(ValueError):
        RunConfig(column_threshold=0.0)
    with pytest.raises(ValueError):
        RunConfig(k_min=1)
    with pytest.raises(ValueError):
        RunConfig(k_min=5, k_max=4)
    with pytest.raises(ValueError):
        RunConfig(restarts=0)
    with pytest.raises(ValueError):
        RunConfig(outcome_features=["a"], lower_is_better=[True, False])


def test_config_from_file_resolves_paths(tmp_path):
    (tmp_path / "c.json").write_text(
        json.dumps({"datasets_path": "d.json", "crosswalk_path": "x.csv", "seed": 5})
    )
    config = RunConfig.from_file(tmp_path / "c.json")
    assert config.seed == 5
    assert config.datasets_path == str((tmp_path / "d.json").resolve())
    assert config.crosswalk_path == str((tmp_path / "x.csv").resolve())
    assert config.out_dir == str((tmp_path / "out").resolve())


def test_config_rejects_unknown_keys(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"clusters": 3}))
    with pytest.raises(ValueError, match="unknown config keys"):
        RunConfig.from_file(tmp_path / "c.json")


def test_config_hash_covers_parameters_but_not_out_dir():
    a = RunConfig(seed=1)
    b = RunConfig(seed=1, out_dir="elsewhere")
    c = RunConfig(seed=2)
    d = RunConfig(seed=1, variance_target=0.8)
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert a.config_hash() != d.config_hash()
    assert "out_dir" not in a.to_dict()


def test_run_ingest_report(corpus):
    directory, _ = corpus
    config = RunConfig.from_file(directory / "config.json")
    result = run_ingest(config)
    assert result.report["datasets"] == 18
    assert result.report["counties"] == 300
    assert sorted(result.report["dropped_columns"]) == [
        "federal_education_investment",
        "icu_occupancy_rate",
        "media_exposure_index",
    ]
    assert result.report["dedup_rows"] == 1
    assert result.report["parse_warnings"] == 3
    # aggregated features made it in
    assert "staffed_beds" in result.master.features
    assert "clinic_count" in result.master.features


def test_run_analysis_recovers_structure(fixture_bundle):
    bundle, info = fixture_bundle
    assert bundle.sweep.recommended_k == 3
    assert bundle.clusters.k == 3
    assert len(bundle.clusters.row_ids) == info["n_counties"] - len(info["sparse_fips"])

    truth = info["truth"]
    pred = bundle.assignments_by_fips()
    fips = sorted(pred)
    ari = adjusted_rand_index(
        np.array([truth[f] for f in fips]), np.array([pred[f] for f in fips])
    )
    assert ari > 0.99

    labels = bundle.report.performance.labels
    assert sorted(labels.values()) == [
        "high-performing",
        "low-performing",
        "medium-performing",
    ]


def test_run_analysis_meta(fixture_bundle):
    bundle, _ = fixture_bundle
    meta = bundle.meta
    assert meta["config_hash"] == RunConfig(**dict(meta["config"])).config_hash()
    assert meta["counts"]["counties_master"] == 300
    assert meta["counts"]["counties_clustered"] == 295
    assert meta["cleaning"]["filtered_fips"] == sorted(
        set(bundle.master.rows) - set(bundle.clusters.row_ids)
    )
    assert meta["final_k"] == 3
    assert "timestamp" not in json.dumps(meta)


def test_k_override(corpus):
    directory, _ = corpus
    config = RunConfig.from_file(directory / "config.json")
    config.k_min, config.k_max, config.restarts = 2, 6, 3  # keep it quick
    config.k_override = 4
    result = run_ingest(config)
    bundle = run_analysis(result.master, config, result.report)
    assert bundle.clusters.k == 4
    assert bundle.meta["final_k"] == 4


def test_full_space_clustering_without_pca(corpus):
    directory, info = corpus
    config = RunConfig.from_file(directory / "config.json")
    config.use_pca = False
    config.k_min, config.k_max, config.restarts = 2, 8, 4
    result = run_ingest(config)
    bundle = run_analysis(result.master, config, result.report)
    assert bundle.pca is None
    assert bundle.sweep.recommended_k == 3
    # in full space the clustered-space importances are the original ones
    assert not bundle.report.importance_clustered.post_hoc
    assert sum(
        e.wcss for e in bundle.report.importance_clustered.entries
    ) == pytest.approx(bundle.clusters.inertia, abs=1e-9)
