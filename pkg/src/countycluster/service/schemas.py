"""Pydantic response models for the explorer API."""

from __future__ import annotations

from pydantic import BaseModel


class ErrorBody(BaseModel):
    code: str
    message: str


class ClustersResponse(BaseModel):
    k: int
    sizes: list[int]
    inertia: float
    mean_silhouette: float
    labels: dict[int, str]
    recommended_k: int
    converged: bool
    iterations: int


class SweepEntryModel(BaseModel):
    k: int
    best_inertia: float
    mean_silhouette: float
    restarts_used: int


class SweepResponse(BaseModel):
    entries: list[SweepEntryModel]
    recommended_k: int
    low_confidence: bool


class FeatureSummary(BaseModel):
    name: str
    kind: str
    source: str
    units: str | None
    min: float | None
    max: float | None
    median: float | None
    missing: int


class ExtremeFeature(BaseModel):
    feature: str
    value: float
    z: float


class CountyResponse(BaseModel):
    fips: str
    state: str
    county_name: str
    cluster: int | None
    performance_label: str | None
    reason: str | None = None
    values: dict[str, float | None]
    top_extremes: list[ExtremeFeature]


class DistributionResponse(BaseModel):
    feature: str
    op: str
    threshold: float
    counts: dict[str, int]
    missing: int
    total_clustered: int


class ScatterPoint(BaseModel):
    fips: str
    x: float
    y: float
    cluster: int


class ScatterResponse(BaseModel):
    x_feature: str
    y_feature: str
    points: list[ScatterPoint]
    excluded: int


class ImportanceEntryModel(BaseModel):
    feature: str
    wcss: float
    tss: float
    importance: float
    degenerate: bool


class ImportanceSpace(BaseModel):
    entries: list[ImportanceEntryModel]
    total_wcss: float
    post_hoc: bool


class ImportanceResponse(BaseModel):
    clustered_space: ImportanceSpace
    original_space: ImportanceSpace


class ProfileCellModel(BaseModel):
    mean: float | None
    median: float | None
    std: float | None
    rating: str | None
    rank: int | None


class ProfileResponse(BaseModel):
    k: int
    features: list[str]
    cluster_sizes: list[int]
    cells: dict[str, dict[str, ProfileCellModel]]
    performance_labels: dict[str, str]


class ClusterShare(BaseModel):
    count: int
    fraction: float


class ExceedEntry(BaseModel):
    state: str
    cluster: int
    fraction: float


class StatesResponse(BaseModel):
    per_state: dict[str, dict[str, ClusterShare]]
    exceed: list[ExceedEntry]
    threshold: float
    total_counties: int


class GapEntryModel(BaseModel):
    feature: str
    gap: float
    raw_a: float
    raw_b: float


class GapResponse(BaseModel):
    fips_a: str
    fips_b: str
    entries: list[GapEntryModel]
    total_distance: float
    skipped_features: list[str]
