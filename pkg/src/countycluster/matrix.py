"""Dense feature matrix shared by the preprocessing, PCA, and clustering stages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class FeatureMatrix:
    """n_rows x n_cols numeric matrix with county row ids and feature names.

    Rows are counties (keyed by FIPS), columns are features. The matrix is
    dense float64; missingness must be resolved before construction.
    """

    values: np.ndarray
    row_ids: list[str]
    col_names: list[str]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D array")
        n_rows, n_cols = self.values.shape
        if n_rows < 2:
            raise ValueError(f"need at least 2 rows, got {n_rows}")
        if n_cols < 1:
            raise ValueError(f"need at least 1 column, got {n_cols}")
        if len(self.row_ids) != n_rows:
            raise ValueError("row_ids length does not match values")
        if len(self.col_names) != n_cols:
            raise ValueError("col_names length does not match values")
        if len(set(self.row_ids)) != n_rows:
            raise ValueError("row_ids must be unique")
        if len(set(self.col_names)) != n_cols:
            raise ValueError("col_names must be unique")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def column_stats(self) -> list[tuple[float, float]]:
        """Per-column (mean, population std)."""
        means = self.values.mean(axis=0)
        stds = self.values.std(axis=0)
        return list(zip(means.tolist(), stds.tolist()))

    def select_columns(self, names: list[str]) -> "FeatureMatrix":
        idx = [self.col_names.index(n) for n in names]
        return FeatureMatrix(self.values[:, idx], list(self.row_ids), list(names))
