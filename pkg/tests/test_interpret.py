import numpy as np
import pytest

from countycluster.cluster import ClusterModel, best_of_restarts
from countycluster.errors import (
    AlignmentError,
    ShapeMismatch,
    UnknownCounty,
    UnknownFeature,
)
from countycluster.ingest import ColumnSpec, join_on_fips
from countycluster.ingest.tables import RawTable
from countycluster.interpret import (
    FeatureImportance,
    InterpretationReport,
    cluster_profile,
    county_gap,
    feature_wcss_decomposition,
    performance_label,
    scatter_pairs,
    state_distribution,
    top_features,
)
from countycluster.matrix import FeatureMatrix
from countycluster.preprocess import ScalerStats, zscore
from countycluster.synthdata import gaussian_blobs

FOUR_POINTS = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])


def four_point_model(row_ids=None):
    return ClusterModel(
        k=2,
        centroids=np.array([[0.0, 0.5], [10.0, 0.5]]),
        assignments=np.array([0, 0, 1, 1]),
        inertia=1.0,
        iterations=1,
        seed=0,
        converged=True,
        row_ids=row_ids,
    )


def matrix_of(values, names=None, ids=None):
    values = np.asarray(values, dtype=np.float64)
    names = names or [f"f{j}" for j in range(values.shape[1])]
    ids = ids or [f"{i:05d}" for i in range(values.shape[0])]
    return FeatureMatrix(values, ids, names)


def master_from_rows(rows, names, identifiers=True):
    columns = []
    if identifiers:
        columns += [
            ColumnSpec(name="state", kind="identifier"),
            ColumnSpec(name="county_name", kind="identifier"),
        ]
    columns += [ColumnSpec(name=n) for n in names]
    return join_on_fips(
        [RawTable(dataset_id="src", key_kind="fips", columns=columns, rows=rows)]
    )


# --- wcss decomposition ---------------------------------------------------------


def test_wcss_four_point_fixture_exact():
    matrix = matrix_of(FOUR_POINTS, names=["x", "y"])
    importance = feature_wcss_decomposition(matrix, four_point_model())
    by_name = {e.feature: e for e in importance.entries}
    assert by_name["x"].tss == 100.0
    assert by_name["x"].wcss == 0.0
    assert by_name["x"].importance == 1.0
    assert by_name["y"].tss == 1.0
    assert by_name["y"].wcss == 1.0
    assert by_name["y"].importance == 0.0
    assert importance.entries[0].feature == "x"  # sorted descending
    assert not importance.post_hoc


def test_wcss_constant_feature_degenerate_flag():
    values = np.array([[0.0, 7.0], [0.0, 7.0], [10.0, 7.0], [10.0, 7.0]])
    model = ClusterModel(
        k=2,
        centroids=np.array([[0.0, 7.0], [10.0, 7.0]]),
        assignments=np.array([0, 0, 1, 1]),
        inertia=0.0,
        iterations=1,
        seed=0,
        converged=True,
    )
    importance = feature_wcss_decomposition(matrix_of(values), model)
    flagged = {e.feature: e for e in importance.entries}["f1"]
    assert flagged.degenerate
    assert flagged.importance == 0.0


def test_wcss_sums_to_model_inertia():
    values, _ = gaussian_blobs(n_points=90, seed=40)
    model = best_of_restarts(values, k=3, restarts=5, seed=1)
    importance = feature_wcss_decomposition(matrix_of(values), model)
    assert sum(e.wcss for e in importance.entries) == pytest.approx(
        model.inertia, abs=1e-9
    )


def test_wcss_post_hoc_flag_when_dimensions_differ():
    values, _ = gaussian_blobs(n_points=60, seed=41)
    model = best_of_restarts(values[:, :2], k=3, restarts=3, seed=2)
    importance = feature_wcss_decomposition(matrix_of(values), model)
    assert importance.post_hoc


def test_wcss_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        feature_wcss_decomposition(matrix_of(FOUR_POINTS[:3]), four_point_model())


def test_top_features_clamps_and_breaks_ties_by_name():
    matrix = matrix_of(FOUR_POINTS, names=["x", "y"])
    importance = feature_wcss_decomposition(matrix, four_point_model())
    assert [e.feature for e in top_features(importance, 10)] == ["x", "y"]

    # equal importances sort alphabetically
    from countycluster.interpret import ImportanceEntry

    tied = FeatureImportance(
        entries=sorted(
            [
                ImportanceEntry("zeta", 1.0, 2.0, 0.5),
                ImportanceEntry("alpha", 1.0, 2.0, 0.5),
            ],
            key=lambda e: (-e.importance, e.feature),
        ),
        total_wcss=2.0,
    )
    assert [e.feature for e in top_features(tied, 2)] == ["alpha", "zeta"]


def test_blob_informative_dimension_ranks_first():
    # separation lives in dimension 0 only
    rng = np.random.default_rng(42)
    a = np.column_stack([rng.normal(0, 0.3, 50), rng.normal(0, 1.0, 50)])
    b = np.column_stack([rng.normal(8, 0.3, 50), rng.normal(0, 1.0, 50)])
    values = np.vstack([a, b])
    model = best_of_restarts(values, k=2, restarts=5, seed=3)
    importance = feature_wcss_decomposition(matrix_of(values, names=["sep", "noise"]), model)
    assert importance.entries[0].feature == "sep"


# --- cluster profile --------------------------------------------------------------


def profile_master_and_model():
    # three clusters with means 10 < 20 < 30 on "metric"
    rows = []
    assignments = []
    row_ids = []
    for c, base in enumerate([10.0, 20.0, 30.0]):
        for i in range(4):
            fips = f"{c + 1:02d}{i:03d}"
            rows.append(
                (fips, {"state": "AA", "county_name": f"C{fips}", "metric": base + i - 1.5})
            )
            row_ids.append(fips)
            assignments.append(c)
    master = master_from_rows(rows, ["metric"])
    model = ClusterModel(
        k=3,
        centroids=np.zeros((3, 1)),
        assignments=np.array(assignments),
        inertia=0.0,
        iterations=1,
        seed=0,
        converged=True,
        row_ids=row_ids,
    )
    return master, model


def test_profile_ratings_follow_means():
    master, model = profile_master_and_model()
    profile = cluster_profile(master, model)
    assert profile.cells[0]["metric"].rating == "Low"
    assert profile.cells[1]["metric"].rating == "Medium"
    assert profile.cells[2]["metric"].rating == "High"
    assert profile.cells[2]["metric"].rank == 1
    assert profile.cells[0]["metric"].mean == pytest.approx(10.0)
    assert profile.cluster_sizes == [4, 4, 4]


def test_profile_two_clusters_high_low_only():
    rows = [
        ("00001", {"state": "AA", "county_name": "a", "v": 1.0}),
        ("00002", {"state": "AA", "county_name": "b", "v": 2.0}),
        ("00003", {"state": "AA", "county_name": "c", "v": 9.0}),
        ("00004", {"state": "AA", "county_name": "d", "v": 10.0}),
    ]
    master = master_from_rows(rows, ["v"])
    model = ClusterModel(
        k=2,
        centroids=np.zeros((2, 1)),
        assignments=np.array([0, 0, 1, 1]),
        inertia=0.0,
        iterations=1,
        seed=0,
        converged=True,
        row_ids=["00001", "00002", "00003", "00004"],
    )
    profile = cluster_profile(master, model)
    assert profile.cells[0]["v"].rating == "Low"
    assert profile.cells[1]["v"].rating == "High"


def test_profile_ties_share_higher_rating():
    rows = [
        ("00001", {"state": "AA", "county_name": "a", "v": 5.0}),
        ("00002", {"state": "AA", "county_name": "b", "v": 5.0}),
        ("00003", {"state": "AA", "county_name": "c", "v": 1.0}),
    ]
    master = master_from_rows(rows, ["v"])
    model = ClusterModel(
        k=3,
        centroids=np.zeros((3, 1)),
        assignments=np.array([0, 1, 2]),
        inertia=0.0,
        iterations=1,
        seed=0,
        converged=True,
        row_ids=["00001", "00002", "00003"],
    )
    profile = cluster_profile(master, model)
    assert profile.cells[0]["v"].rating == "High"
    assert profile.cells[1]["v"].rating == "High"
    assert profile.cells[2]["v"].rating == "Low"


def test_profile_requires_row_ids():
    master, model = profile_master_and_model()
    model.row_ids = None
    with pytest.raises(AlignmentError):
        cluster_profile(master, model)


def test_profile_rating_monotone_in_means():
    master, model = profile_master_and_model()
    profile = cluster_profile(master, model)
    pairs = [
        (profile.cells[c]["metric"].mean, profile.cells[c]["metric"].rank)
        for c in range(3)
    ]
    for mean_a, rank_a in pairs:
        for mean_b, rank_b in pairs:
            if mean_a > mean_b:
                assert rank_a < rank_b  # higher mean -> better (smaller) rank


# --- performance labels ---------------------------------------------------------------


def test_performance_single_feature_lower_better():
    master, model = profile_master_and_model()
    profile = cluster_profile(master, model)
    labeling = performance_label(profile, ["metric"], [True])
    assert labeling.labels[0] == "high-performing"  # lowest mean, lower is better
    assert labeling.labels[1] == "medium-performing"
    assert labeling.labels[2] == "low-performing"


def test_performance_opposite_features_tie_breaks_by_index():
    rows = []
    row_ids = []
    assignments = []
    # cluster 0: (a=1, b=3); cluster 1: (a=3, b=1); cluster 2: (a=2, b=2)
    values = {0: (1.0, 3.0), 1: (3.0, 1.0), 2: (2.0, 2.0)}
    for c, (a, b) in values.items():
        for i in range(2):
            fips = f"{c:02d}{i:03d}"
            rows.append((fips, {"state": "AA", "county_name": fips, "a": a, "b": b}))
            row_ids.append(fips)
            assignments.append(c)
    master = master_from_rows(rows, ["a", "b"])
    model = ClusterModel(
        k=3,
        centroids=np.zeros((3, 2)),
        assignments=np.array(assignments),
        inertia=0.0,
        iterations=1,
        seed=0,
        converged=True,
        row_ids=row_ids,
    )
    profile = cluster_profile(master, model)
    labeling = performance_label(profile, ["a", "b"], [True, True])
    # all composites equal -> ordering by cluster index
    assert labeling.labels == {
        0: "high-performing",
        1: "medium-performing",
        2: "low-performing",
    }


def test_performance_invariant_under_feature_rescaling():
    master, model = profile_master_and_model()
    profile = cluster_profile(master, model)
    base = performance_label(profile, ["metric"], [True])

    scaled_rows = []
    for fips, row in master.rows.items():
        scaled_rows.append(
            (
                fips,
                {
                    "state": row.state,
                    "county_name": row.county_name,
                    "metric": row.cells["metric"] * 1000.0,
                },
            )
        )
    scaled_master = master_from_rows(scaled_rows, ["metric"])
    scaled = performance_label(cluster_profile(scaled_master, model), ["metric"], [True])
    assert scaled.labels == base.labels
    for c in range(3):
        assert scaled.composite[c] == pytest.approx(base.composite[c], abs=1e-9)


def test_performance_unknown_feature():
    master, model = profile_master_and_model()
    profile = cluster_profile(master, model)
    with pytest.raises(UnknownFeature):
        performance_label(profile, ["missing_feature"], [True])


# --- state distribution -------------------------------------------------------------------


def states_master_and_model():
    rows = []
    row_ids = []
    assignments = []
    # state AA: 7 of 10 in cluster 0; state BB: single county in cluster 1
    for i in range(10):
        fips = f"01{i:03d}"
        rows.append((fips, {"state": "AA", "county_name": fips, "v": 1.0}))
        row_ids.append(fips)
        assignments.append(0 if i < 7 else 1)
    rows.append(("02000", {"state": "BB", "county_name": "solo", "v": 1.0}))
    row_ids.append("02000")
    assignments.append(1)
    master = master_from_rows(rows, ["v"])
    model = ClusterModel(
        k=2,
        centroids=np.zeros((2, 1)),
        assignments=np.array(assignments),
        inertia=0.0,
        iterations=1,
        seed=0,
        converged=True,
        row_ids=row_ids,
    )
    return master, model


def test_state_distribution_counts_and_fractions():
    master, model = states_master_and_model()
    dist = state_distribution(master, model)
    assert dist.per_state["AA"][0] == {"count": 7, "fraction": 0.7}
    assert dist.per_state["BB"][1] == {"count": 1, "fraction": 1.0}
    for state in dist.per_state:
        assert sum(v["fraction"] for v in dist.per_state[state].values()) == pytest.approx(
            1.0, abs=1e-12
        )
    assert dist.total_counties == 11


def test_state_distribution_exceed_list():
    master, model = states_master_and_model()
    dist = state_distribution(master, model, exceed_threshold=0.6)
    assert {"state": "AA", "cluster": 0, "fraction": 0.7} in dist.exceed
    assert {"state": "BB", "cluster": 1, "fraction": 1.0} in dist.exceed


# --- scatter ------------------------------------------------------------------------------


def test_scatter_pairs_full_and_excluded():
    rows = [
        ("00001", {"state": "AA", "county_name": "a", "x": 1.0, "y": 2.0}),
        ("00002", {"state": "AA", "county_name": "b", "x": None, "y": 3.0}),
        ("00003", {"state": "AA", "county_name": "c", "x": 5.0, "y": 6.0}),
    ]
    master = master_from_rows(rows, ["x", "y"])
    model = ClusterModel(
        k=2,
        centroids=np.zeros((2, 1)),
        assignments=np.array([0, 1, 1]),
        inertia=0.0,
        iterations=1,
        seed=0,
        converged=True,
        row_ids=["00001", "00002", "00003"],
    )
    data = scatter_pairs(master, model, "x", "y")
    assert len(data.points) == 2
    assert data.excluded == 1
    by_fips = {p["fips"]: p for p in data.points}
    assert by_fips["00001"]["cluster"] == 0
    assert by_fips["00003"]["cluster"] == 1

    with pytest.raises(UnknownFeature):
        scatter_pairs(master, model, "x", "nope")


# --- county gap ----------------------------------------------------------------------------


def gap_setup():
    rows = [
        ("00001", {"state": "AA", "county_name": "a", "f1": 0.2, "f2": 0.9}),
        ("00002", {"state": "AA", "county_name": "b", "f1": 0.8, "f2": 0.1}),
        ("00003", {"state": "AA", "county_name": "c", "f1": 0.5, "f2": 0.5}),
    ]
    master = master_from_rows(rows, ["f1", "f2"])
    stats = ScalerStats(columns=["f1", "f2"], means=[0.0, 0.0], stds=[1.0, 1.0])
    return master, stats


def test_county_gap_hand_computed():
    master, stats = gap_setup()
    gap = county_gap(master, "00001", "00002", stats)
    assert [e.feature for e in gap.entries] == ["f2", "f1"]
    assert gap.entries[0].gap == pytest.approx(0.8)
    assert gap.entries[1].gap == pytest.approx(0.6)
    assert gap.total_distance == pytest.approx(1.0)
    assert gap.entries[0].raw_a == 0.9 and gap.entries[0].raw_b == 0.1


def test_county_gap_identity():
    master, stats = gap_setup()
    gap = county_gap(master, "00003", "00003", stats)
    assert all(e.gap == 0.0 for e in gap.entries)
    assert gap.total_distance == 0.0


def test_county_gap_single_axis():
    rows = [
        ("00001", {"state": "AA", "county_name": "a", "f1": 0.0, "f2": 5.0}),
        ("00002", {"state": "AA", "county_name": "b", "f1": 4.0, "f2": 5.0}),
    ]
    master = master_from_rows(rows, ["f1", "f2"])
    stats = ScalerStats(columns=["f1", "f2"], means=[0.0, 0.0], stds=[2.0, 1.0])
    gap = county_gap(master, "00001", "00002", stats)
    assert gap.entries[0].feature == "f1"
    assert gap.entries[0].gap == pytest.approx(2.0)
    assert gap.total_distance == pytest.approx(2.0)


def test_county_gap_unknown_county():
    master, stats = gap_setup()
    with pytest.raises(UnknownCounty):
        county_gap(master, "00001", "99999", stats)


def test_county_gap_matches_clustering_distance():
    # gap total equals the Euclidean distance in the standardized space
    rng = np.random.default_rng(50)
    raw = rng.uniform(1, 100, size=(10, 4))
    names = [f"f{j}" for j in range(4)]
    ids = [f"{i:05d}" for i in range(10)]
    rows = [
        (ids[i], dict({"state": "AA", "county_name": ids[i]}, **{n: raw[i, j] for j, n in enumerate(names)}))
        for i in range(10)
    ]
    master = master_from_rows(rows, names)
    scaled, stats = zscore(FeatureMatrix(raw, ids, names))
    gap = county_gap(master, ids[2], ids[7], stats)
    direct = float(np.sqrt(((scaled.values[2] - scaled.values[7]) ** 2).sum()))
    assert gap.total_distance == pytest.approx(direct, rel=1e-9)


# --- report assembly --------------------------------------------------------------------------


def test_report_round_trip():
    from countycluster.interpret import build_report

    master, model = profile_master_and_model()
    matrix = FeatureMatrix(
        np.array([[master.rows[f].cells["metric"]] for f in model.row_ids]),
        model.row_ids,
        ["metric"],
    )
    report = build_report(master, matrix, matrix, model, ["metric"], [True])
    restored = InterpretationReport.from_dict(report.to_dict())
    assert restored.performance.labels == report.performance.labels
    assert restored.profile.cells[0]["metric"].rating == report.profile.cells[0][
        "metric"
    ].rating
    assert restored.states.per_state == report.states.per_state
