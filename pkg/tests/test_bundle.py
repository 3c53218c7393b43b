import numpy as np
import pytest

from countycluster.bundle import (
    AnalysisBundle,
    export_assignments,
    filter_distribution,
    write_assignments,
)
from countycluster.cluster import ClusterModel, KSweepReport
from countycluster.errors import (
    BadOperator,
    IncompleteBundle,
    MissingBundle,
    UnknownFeature,
)
from countycluster.ingest import ColumnSpec, impute_median, join_on_fips
from countycluster.ingest.tables import RawTable
from countycluster.interpret import build_report
from countycluster.preprocess import zscore


def six_county_bundle():
    """Hand-built 6-county bundle: v = 1..5 plus one missing value."""
    values = {"10001": 1.0, "10002": 2.0, "10003": 3.0, "20001": 4.0, "20002": 5.0, "20003": None}
    rows = [
        (fips, {"state": fips[:1] + "S", "county_name": f"c{fips}", "v": v})
        for fips, v in values.items()
    ]
    table = RawTable(
        dataset_id="src",
        key_kind="fips",
        columns=[
            ColumnSpec(name="state", kind="identifier"),
            ColumnSpec(name="county_name", kind="identifier"),
            ColumnSpec(name="v"),
        ],
        rows=rows,
    )
    master = join_on_fips([table])
    matrix = impute_median(master)
    scaled, scaler = zscore(matrix)
    row_ids = matrix.row_ids
    assignments = np.array([0 if fips.startswith("1") else 1 for fips in row_ids])
    centroids = np.vstack(
        [matrix.values[assignments == c].mean(axis=0) for c in (0, 1)]
    )
    model = ClusterModel(
        k=2,
        centroids=centroids,
        assignments=assignments,
        inertia=0.0,
        iterations=1,
        seed=0,
        converged=True,
        row_ids=row_ids,
    )
    report = build_report(master, matrix, scaled, model, ["v"], [True])
    return AnalysisBundle(
        master=master,
        scaler=scaler,
        pca=None,
        clusters=model,
        mean_silhouette=0.5,
        sweep=KSweepReport(entries=[], recommended_k=2),
        report=report,
        meta={"config": {"display_features": ["v"]}, "seed": 0},
    )


# --- distribution filter -----------------------------------------------------


def test_distribution_manual_tally():
    bundle = six_county_bundle()
    # values 1,2,3 in cluster 0; 4,5,missing in cluster 1; threshold 3 = median
    result = filter_distribution(bundle, "v", "gte", 3.0)
    assert result.counts == {0: 1, 1: 2}
    assert result.missing == 1
    assert result.total_clustered == 6

    result = filter_distribution(bundle, "v", "lte", 3.0)
    assert result.counts == {0: 3, 1: 0}


def test_distribution_vacuous_filter_equals_cluster_sizes(fixture_bundle):
    bundle, _ = fixture_bundle
    summary = {
        f: [v for v in bundle.master.column_values(f) if v is not None]
        for f in ["positivity_rate"]
    }
    low = min(summary["positivity_rate"]) - 1.0
    result = filter_distribution(bundle, "positivity_rate", "gte", low)
    sizes = bundle.clusters.cluster_sizes()
    assert [result.counts[c] for c in range(bundle.clusters.k)] == [
        sizes[c] - _missing_in_cluster(bundle, "positivity_rate", c)
        for c in range(bundle.clusters.k)
    ]
    # above the max, nothing passes
    high = max(summary["positivity_rate"]) + 1.0
    result = filter_distribution(bundle, "positivity_rate", "gte", high)
    assert all(n == 0 for n in result.counts.values())


def _missing_in_cluster(bundle, feature, cluster):
    return sum(
        1
        for fips, c in bundle.assignments_by_fips().items()
        if c == cluster and bundle.master.rows[fips].cells.get(feature) is None
    )


def test_distribution_counts_bounded(fixture_bundle):
    bundle, _ = fixture_bundle
    rng = np.random.default_rng(1)
    features = [f for f in bundle.master.features][:5]
    for feature in features:
        present = [v for v in bundle.master.column_values(feature) if v is not None]
        for _ in range(5):
            threshold = float(rng.uniform(min(present), max(present)))
            op = "gte" if rng.uniform() < 0.5 else "lte"
            result = filter_distribution(bundle, feature, op, threshold)
            assert sum(result.counts.values()) + result.missing <= result.total_clustered


def test_distribution_errors():
    bundle = six_county_bundle()
    with pytest.raises(UnknownFeature):
        filter_distribution(bundle, "nope", "gte", 1.0)
    with pytest.raises(BadOperator):
        filter_distribution(bundle, "v", "between", 1.0)


# --- assignments export ---------------------------------------------------------


def test_export_assignments_covers_master_exactly(fixture_bundle):
    bundle, info = fixture_bundle
    exported = export_assignments(bundle)
    assert sorted(exported) == bundle.master.fips_list()
    clustered = bundle.assignments_by_fips()
    for fips, entry in exported.items():
        if fips in clustered:
            assert entry["cluster"] == clustered[fips]
            assert entry["performance_label"] is not None
        else:
            assert entry["cluster"] is None
            assert entry["reason"] == "filtered"
    # the sparse counties from the corpus are precisely the filtered ones
    filtered = [f for f, e in exported.items() if e["cluster"] is None]
    assert filtered == info["sparse_fips"]


def test_export_assignments_byte_identical(fixture_bundle, tmp_path):
    bundle, _ = fixture_bundle
    write_assignments(bundle, tmp_path / "a.json")
    write_assignments(bundle, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_export_display_values_present():
    bundle = six_county_bundle()
    exported = export_assignments(bundle)
    assert exported["10001"]["values"] == {"v": 1.0}
    assert exported["20003"]["values"] == {"v": None}


# --- save / load ------------------------------------------------------------------


def test_bundle_save_load_round_trip(fixture_bundle, tmp_path):
    bundle, _ = fixture_bundle
    bundle.save(tmp_path / "bundle")
    loaded = AnalysisBundle.load(tmp_path / "bundle")
    assert loaded.clusters.k == bundle.clusters.k
    assert (loaded.clusters.assignments == bundle.clusters.assignments).all()
    assert loaded.clusters.row_ids == bundle.clusters.row_ids
    assert loaded.scaler == bundle.scaler
    assert loaded.meta == bundle.meta
    assert loaded.report.performance.labels == bundle.report.performance.labels
    assert (loaded.pca.components == bundle.pca.components).all()

    # re-saving the loaded bundle reproduces identical bytes
    loaded.save(tmp_path / "bundle2")
    for name in (
        "master.csv",
        "dictionary.json",
        "scaler.json",
        "pca.json",
        "clusters.json",
        "report.json",
        "meta.json",
    ):
        assert (tmp_path / "bundle" / name).read_bytes() == (
            tmp_path / "bundle2" / name
        ).read_bytes(), name


def test_bundle_load_missing_dir(tmp_path):
    with pytest.raises(MissingBundle):
        AnalysisBundle.load(tmp_path / "nope")


def test_bundle_load_incomplete(fixture_bundle, tmp_path):
    bundle, _ = fixture_bundle
    bundle.save(tmp_path / "partial")
    (tmp_path / "partial" / "clusters.json").unlink()
    with pytest.raises(IncompleteBundle) as err:
        AnalysisBundle.load(tmp_path / "partial")
    assert "clusters.json" in err.value.details["missing"]


def test_bundle_rejects_row_id_mismatch():
    bundle = six_county_bundle()
    model = bundle.clusters
    model.row_ids = ["99999"] + model.row_ids[1:]
    with pytest.raises(IncompleteBundle):
        AnalysisBundle(
            master=bundle.master,
            scaler=bundle.scaler,
            pca=None,
            clusters=model,
            mean_silhouette=0.0,
            sweep=bundle.sweep,
            report=bundle.report,
            meta={},
        )
