"""Explain clusters: feature importances, per-cluster profiles, performance
labels, state distributions, scatter extracts, and county gap analysis."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .cluster import ClusterModel
from .errors import AlignmentError, ShapeMismatch, UnknownCounty, UnknownFeature
from .ingest.master import MasterTable
from .matrix import FeatureMatrix
from .preprocess import ScalerStats

logger = logging.getLogger(__name__)

RATING_HIGH = "High"
RATING_MEDIUM = "Medium"
RATING_LOW = "Low"

LABELS_K3 = ["high-performing", "medium-performing", "low-performing"]


# --- feature importance ------------------------------------------------------


@dataclass
class ImportanceEntry:
    feature: str
    wcss: float
    tss: float
    importance: float
    degenerate: bool = False  # tss == 0; importance reported as 0

    def to_dict(self) -> dict:
        return vars(self)


@dataclass
class FeatureImportance:
    entries: list[ImportanceEntry]  # sorted by importance descending
    total_wcss: float
    post_hoc: bool = False  # centroids recomputed in this space, not the model's

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "total_wcss": self.total_wcss,
            "post_hoc": self.post_hoc,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureImportance":
        return cls(
            entries=[ImportanceEntry(**e) for e in d["entries"]],
            total_wcss=float(d["total_wcss"]),
            post_hoc=bool(d.get("post_hoc", False)),
        )


def feature_wcss_decomposition(
    matrix: FeatureMatrix, model: ClusterModel
) -> FeatureImportance:
    """Split the within-cluster sum of squares by feature.

    importance_j = 1 - wcss_j / tss_j: the share of feature j's total spread
    that cluster membership explains. When the matrix is the space the model
    was fit in, the model centroids are used and sum(wcss_j) equals the model
    inertia exactly. Otherwise (e.g. original features for a PCA-space model)
    centroids are recomputed as per-cluster means and the result is flagged
    post hoc.
    """
    values = matrix.values
    assignments = np.asarray(model.assignments)
    if values.shape[0] != assignments.shape[0]:
        raise ShapeMismatch("matrix rows do not match model assignments")

    if model.centroids.shape[1] == values.shape[1]:
        centroids = model.centroids
        post_hoc = False
    else:
        centroids = np.vstack(
            [values[assignments == c].mean(axis=0) for c in range(model.k)]
        )
        post_hoc = True

    diffs = values - centroids[assignments]
    wcss = (diffs * diffs).sum(axis=0)
    centered = values - values.mean(axis=0)
    tss = (centered * centered).sum(axis=0)

    entries = []
    for j, name in enumerate(matrix.col_names):
        degenerate = tss[j] == 0.0
        importance = 0.0 if degenerate else 1.0 - wcss[j] / tss[j]
        entries.append(
            ImportanceEntry(
                feature=name,
                wcss=float(wcss[j]),
                tss=float(tss[j]),
                importance=float(importance),
                degenerate=bool(degenerate),
            )
        )
    entries.sort(key=lambda e: (-e.importance, e.feature))
    return FeatureImportance(
        entries=entries, total_wcss=float(wcss.sum()), post_hoc=post_hoc
    )


def top_features(importance: FeatureImportance, n: int = 10) -> list[ImportanceEntry]:
    """First n entries by importance; ties already break by feature name."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return importance.entries[:n]


# --- cluster profiles ----------------------------------------------------------


@dataclass
class ProfileCell:
    mean: float | None
    median: float | None
    std: float | None
    rating: str | None
    rank: int | None  # 1 = highest mean

    def to_dict(self) -> dict:
        return vars(self)


@dataclass
class ClusterProfile:
    k: int
    features: list[str]
    cluster_sizes: list[int]
    cells: dict[int, dict[str, ProfileCell]]  # cluster -> feature -> stats

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "features": self.features,
            "cluster_sizes": self.cluster_sizes,
            "cells": {
                str(c): {f: cell.to_dict() for f, cell in by_feature.items()}
                for c, by_feature in self.cells.items()
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClusterProfile":
        return cls(
            k=int(d["k"]),
            features=list(d["features"]),
            cluster_sizes=[int(x) for x in d["cluster_sizes"]],
            cells={
                int(c): {f: ProfileCell(**cell) for f, cell in by_feature.items()}
                for c, by_feature in d["cells"].items()
            },
        )


def _rating_for_position(position: int, k: int) -> str:
    if position == 0:
        return RATING_HIGH
    if position == k - 1:
        return RATING_LOW
    return RATING_MEDIUM


def _assignments_by_fips(model: ClusterModel) -> dict[str, int]:
    if model.row_ids is None:
        raise AlignmentError("cluster model carries no row ids; fit via the pipeline")
    return {fips: int(c) for fips, c in zip(model.row_ids, model.assignments)}


def cluster_profile(master: MasterTable, model: ClusterModel) -> ClusterProfile:
    """Per-cluster summary statistics in original units, with High/Medium/Low
    ratings ranking the cluster means per feature (ties share the higher
    rating)."""
    by_fips = _assignments_by_fips(model)
    missing_rows = [f for f in by_fips if f not in master.rows]
    if missing_rows:
        raise AlignmentError(
            f"{len(missing_rows)} clustered counties absent from master",
            examples=missing_rows[:5],
        )

    numeric = [
        f for f in master.features if master.feature_info[f].kind == "numeric"
    ]
    grouped: dict[int, list[str]] = {c: [] for c in range(model.k)}
    for fips, c in by_fips.items():
        grouped[c].append(fips)

    cells: dict[int, dict[str, ProfileCell]] = {c: {} for c in range(model.k)}
    for feature in numeric:
        means: dict[int, float | None] = {}
        for c in range(model.k):
            present = [
                master.rows[f].cells.get(feature)
                for f in grouped[c]
                if master.rows[f].cells.get(feature) is not None
            ]
            if not present:
                means[c] = None
                cells[c][feature] = ProfileCell(None, None, None, None, None)
                continue
            arr = np.asarray(present, dtype=np.float64)
            means[c] = float(arr.mean())
            cells[c][feature] = ProfileCell(
                mean=float(arr.mean()),
                median=float(np.median(arr)),
                std=float(arr.std()),
                rating=None,
                rank=None,
            )
        ranked = [c for c in range(model.k) if means[c] is not None]
        for c in ranked:
            position = sum(1 for other in ranked if means[other] > means[c])
            cells[c][feature].rank = position + 1
            cells[c][feature].rating = _rating_for_position(position, model.k)

    sizes = [len(grouped[c]) for c in range(model.k)]
    return ClusterProfile(k=model.k, features=numeric, cluster_sizes=sizes, cells=cells)


# --- performance labels -----------------------------------------------------------


@dataclass
class PerformanceLabeling:
    labels: dict[int, str]
    composite: dict[int, float]
    outcome_features: list[str]
    lower_is_better: list[bool]

    def to_dict(self) -> dict:
        return {
            "labels": {str(c): v for c, v in self.labels.items()},
            "composite": {str(c): v for c, v in self.composite.items()},
            "outcome_features": self.outcome_features,
            "lower_is_better": self.lower_is_better,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PerformanceLabeling":
        return cls(
            labels={int(c): v for c, v in d["labels"].items()},
            composite={int(c): float(v) for c, v in d["composite"].items()},
            outcome_features=list(d["outcome_features"]),
            lower_is_better=[bool(b) for b in d["lower_is_better"]],
        )


def performance_label(
    profile: ClusterProfile,
    outcome_features: list[str],
    lower_is_better: list[bool] | None = None,
) -> PerformanceLabeling:
    """Rank clusters by a composite of standardized outcome-feature means.

    Each outcome feature's cluster means are standardized across clusters and
    sign-adjusted so that higher composite = better; the best cluster is
    labeled high-performing. Ties break to the lower cluster index.
    """
    if lower_is_better is None:
        lower_is_better = [True] * len(outcome_features)
    if len(lower_is_better) != len(outcome_features):
        raise ValueError("lower_is_better must align with outcome_features")
    unknown = [f for f in outcome_features if f not in profile.features]
    if unknown:
        raise UnknownFeature(f"outcome features not in profile: {unknown}")

    k = profile.k
    composite = np.zeros(k)
    for feature, lower_better in zip(outcome_features, lower_is_better):
        means = np.array(
            [
                np.nan
                if profile.cells[c][feature].mean is None
                else profile.cells[c][feature].mean
                for c in range(k)
            ]
        )
        if np.isnan(means).any():
            raise UnknownFeature(
                f"outcome feature {feature!r} has no data for some cluster"
            )
        std = means.std()
        z = np.zeros(k) if std == 0.0 else (means - means.mean()) / std
        composite += -z if lower_better else z
    composite /= len(outcome_features)

    order = sorted(range(k), key=lambda c: (-composite[c], c))
    labels = {}
    for rank, c in enumerate(order):
        if k == 3:
            labels[c] = LABELS_K3[rank]
        elif k == 2:
            labels[c] = ["high-performing", "low-performing"][rank]
        else:
            labels[c] = f"rank-{rank + 1}"
    return PerformanceLabeling(
        labels=labels,
        composite={c: float(composite[c]) for c in range(k)},
        outcome_features=list(outcome_features),
        lower_is_better=list(lower_is_better),
    )


# --- state distributions ------------------------------------------------------------


@dataclass
class StateDistribution:
    per_state: dict[str, dict[int, dict]]  # state -> cluster -> {count, fraction}
    exceed: list[dict]  # states with > threshold of counties in one cluster
    threshold: float
    total_counties: int

    def to_dict(self) -> dict:
        return {
            "per_state": {
                s: {str(c): v for c, v in by_cluster.items()}
                for s, by_cluster in self.per_state.items()
            },
            "exceed": self.exceed,
            "threshold": self.threshold,
            "total_counties": self.total_counties,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StateDistribution":
        return cls(
            per_state={
                s: {int(c): v for c, v in by_cluster.items()}
                for s, by_cluster in d["per_state"].items()
            },
            exceed=list(d["exceed"]),
            threshold=float(d["threshold"]),
            total_counties=int(d["total_counties"]),
        )


def state_distribution(
    master: MasterTable, model: ClusterModel, exceed_threshold: float = 0.6
) -> StateDistribution:
    """Per-state cluster counts and fractions over the clustered counties,
    flagging states that concentrate more than ``exceed_threshold`` of their
    counties in a single cluster."""
    by_fips = _assignments_by_fips(model)
    counts: dict[str, dict[int, int]] = {}
    for fips, c in by_fips.items():
        row = master.rows.get(fips)
        if row is None:
            raise AlignmentError(f"clustered county {fips} absent from master")
        state_counts = counts.setdefault(row.state, {})
        state_counts[c] = state_counts.get(c, 0) + 1

    per_state: dict[str, dict[int, dict]] = {}
    exceed = []
    for state in sorted(counts):
        total = sum(counts[state].values())
        per_state[state] = {}
        for c in range(model.k):
            n = counts[state].get(c, 0)
            per_state[state][c] = {"count": n, "fraction": n / total}
        for c in range(model.k):
            fraction = per_state[state][c]["fraction"]
            if fraction > exceed_threshold:
                exceed.append({"state": state, "cluster": c, "fraction": fraction})
    return StateDistribution(
        per_state=per_state,
        exceed=exceed,
        threshold=exceed_threshold,
        total_counties=len(by_fips),
    )


# --- scatter extracts ------------------------------------------------------------------


@dataclass
class ScatterData:
    x_feature: str
    y_feature: str
    points: list[dict]  # {fips, x, y, cluster}
    excluded: int  # rows missing either value

    def to_dict(self) -> dict:
        return vars(self)


def scatter_pairs(
    master: MasterTable, model: ClusterModel, x_feature: str, y_feature: str
) -> ScatterData:
    """(fips, x, y, cluster) rows for the clustered counties having both values."""
    for feature in (x_feature, y_feature):
        if feature not in master.features:
            raise UnknownFeature(f"unknown feature {feature!r}")
    by_fips = _assignments_by_fips(model)
    points = []
    excluded = 0
    for fips in sorted(by_fips):
        cells = master.rows[fips].cells
        x, y = cells.get(x_feature), cells.get(y_feature)
        if x is None or y is None:
            excluded += 1
            continue
        points.append({"fips": fips, "x": x, "y": y, "cluster": by_fips[fips]})
    return ScatterData(
        x_feature=x_feature, y_feature=y_feature, points=points, excluded=excluded
    )


# --- county gap analysis ------------------------------------------------------------------


@dataclass
class GapEntry:
    feature: str
    gap: float  # absolute standardized difference
    raw_a: float
    raw_b: float

    def to_dict(self) -> dict:
        return vars(self)


@dataclass
class CountyGap:
    fips_a: str
    fips_b: str
    entries: list[GapEntry]  # sorted by gap descending
    total_distance: float  # Euclidean distance in standardized space
    skipped_features: list[str]  # missing for either county

    def to_dict(self) -> dict:
        return {
            "fips_a": self.fips_a,
            "fips_b": self.fips_b,
            "entries": [e.to_dict() for e in self.entries],
            "total_distance": self.total_distance,
            "skipped_features": self.skipped_features,
        }


def county_gap(
    master: MasterTable, fips_a: str, fips_b: str, standardizer: ScalerStats
) -> CountyGap:
    """Per-feature standardized gaps between two counties, largest first.

    The total distance is the Euclidean distance between the two counties in
    the standardized feature space, i.e. the same geometry the clustering
    uses when run on the full standardized matrix.
    """
    for fips in (fips_a, fips_b):
        if fips not in master.rows:
            raise UnknownCounty(f"county {fips} not in master table")
    row_a, row_b = master.rows[fips_a], master.rows[fips_b]

    entries = []
    skipped = []
    for i, feature in enumerate(standardizer.columns):
        a, b = row_a.cells.get(feature), row_b.cells.get(feature)
        if a is None or b is None:
            skipped.append(feature)
            continue
        gap = abs(a - b) / standardizer.stds[i]
        entries.append(GapEntry(feature=feature, gap=float(gap), raw_a=a, raw_b=b))
    entries.sort(key=lambda e: (-e.gap, e.feature))
    total = float(np.sqrt(sum(e.gap * e.gap for e in entries)))
    return CountyGap(
        fips_a=fips_a,
        fips_b=fips_b,
        entries=entries,
        total_distance=total,
        skipped_features=skipped,
    )


# --- assembled report ------------------------------------------------------------------


@dataclass
class InterpretationReport:
    importance_clustered: FeatureImportance
    importance_original: FeatureImportance
    profile: ClusterProfile
    performance: PerformanceLabeling
    states: StateDistribution

    def to_dict(self) -> dict:
        return {
            "importance_clustered_space": self.importance_clustered.to_dict(),
            "importance_original_space": self.importance_original.to_dict(),
            "profile": self.profile.to_dict(),
            "performance": self.performance.to_dict(),
            "states": self.states.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InterpretationReport":
        return cls(
            importance_clustered=FeatureImportance.from_dict(
                d["importance_clustered_space"]
            ),
            importance_original=FeatureImportance.from_dict(
                d["importance_original_space"]
            ),
            profile=ClusterProfile.from_dict(d["profile"]),
            performance=PerformanceLabeling.from_dict(d["performance"]),
            states=StateDistribution.from_dict(d["states"]),
        )


def build_report(
    master: MasterTable,
    clustered_matrix: FeatureMatrix,
    standardized_matrix: FeatureMatrix,
    model: ClusterModel,
    outcome_features: list[str],
    lower_is_better: list[bool] | None = None,
    exceed_threshold: float = 0.6,
) -> InterpretationReport:
    """Assemble the full interpretation report for a fitted model."""
    profile = cluster_profile(master, model)
    return InterpretationReport(
        importance_clustered=feature_wcss_decomposition(clustered_matrix, model),
        importance_original=feature_wcss_decomposition(standardized_matrix, model),
        profile=profile,
        performance=performance_label(profile, outcome_features, lower_is_better),
        states=state_distribution(master, model, exceed_threshold),
    )
