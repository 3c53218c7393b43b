"""Standardize the dense feature matrix for distance-based analysis."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import AllColumnsConstant, DimensionMismatch
from .matrix import FeatureMatrix

logger = logging.getLogger(__name__)


@dataclass
class ScalerStats:
    """Recorded means/stds to invert the z-score transform.

    ``divisor`` documents the variance convention: population variance
    (divide by n), so downstream tests are unambiguous.
    """

    columns: list[str]
    means: list[float]
    stds: list[float]
    dropped_constant: list[str] = field(default_factory=list)
    divisor: str = "n"

    def to_dict(self) -> dict:
        return {
            "columns": self.columns,
            "means": self.means,
            "stds": self.stds,
            "dropped_constant": self.dropped_constant,
            "divisor": self.divisor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerStats":
        return cls(
            columns=list(d["columns"]),
            means=[float(v) for v in d["means"]],
            stds=[float(v) for v in d["stds"]],
            dropped_constant=list(d.get("dropped_constant", [])),
            divisor=d.get("divisor", "n"),
        )

    def standardize_value(self, column: str, value: float) -> float:
        i = self.columns.index(column)
        return (value - self.means[i]) / self.stds[i]


def zscore(matrix: FeatureMatrix) -> tuple[FeatureMatrix, ScalerStats]:
    """Scale every column to mean 0 and population variance 1.

    Constant columns (population std exactly 0) carry no distance information
    and would produce degenerate PCA directions, so they are dropped with a
    warning and recorded in the returned stats.
    """
    means = matrix.values.mean(axis=0)
    stds = matrix.values.std(axis=0)  # population std, ddof=0

    keep = stds > 0.0
    dropped = [name for name, k in zip(matrix.col_names, keep) if not k]
    if not keep.any():
        raise AllColumnsConstant("every column is constant; nothing to standardize")
    for name in dropped:
        logger.warning("dropping constant column %r (zero variance)", name)

    values = (matrix.values[:, keep] - means[keep]) / stds[keep]
    kept_names = [name for name, k in zip(matrix.col_names, keep) if k]
    scaled = FeatureMatrix(values, list(matrix.row_ids), kept_names)
    stats = ScalerStats(
        columns=kept_names,
        means=means[keep].tolist(),
        stds=stds[keep].tolist(),
        dropped_constant=dropped,
    )
    return scaled, stats


def inverse_zscore(matrix: FeatureMatrix, stats: ScalerStats) -> FeatureMatrix:
    """Undo zscore for the non-dropped columns: x = z * std + mean."""
    if matrix.col_names != stats.columns:
        raise DimensionMismatch(
            "matrix columns do not match scaler stats",
            expected=stats.columns,
            got=matrix.col_names,
        )
    values = matrix.values * np.asarray(stats.stds) + np.asarray(stats.means)
    return FeatureMatrix(values, list(matrix.row_ids), list(matrix.col_names))
