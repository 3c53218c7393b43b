"""Principal component analysis built on a cyclic Jacobi eigensolver.

Everything here is deterministic: fixed sweep order, fixed eigenvector sign
convention (largest-magnitude entry positive), stable descending eigenvalue
sort. Identical input produces a bit-identical model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllColumnsConstant,
    DimensionMismatch,
    NoConvergence,
    NotStandardized,
    NotSymmetric,
    TooFewComponents,
)
from .matrix import FeatureMatrix

MAX_SWEEPS = 100
OFF_DIAGONAL_SHRINK = 1e-12  # converged when off-norm < this fraction of start


def covariance(matrix: FeatureMatrix) -> np.ndarray:
    """Population covariance (divide by n) of the centered columns."""
    if matrix.n_rows < 2:
        raise DimensionMismatch("covariance needs at least 2 rows")
    centered = matrix.values - matrix.values.mean(axis=0)
    cov = centered.T @ centered / matrix.n_rows
    # BLAS does not guarantee bit-symmetric output; symmetrize explicitly
    return (cov + cov.T) / 2.0


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt((off * off).sum()))


def _fix_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))  # first index on ties
    return -v if v[i] < 0 else v


def eigen_symmetric(m: np.ndarray) -> list[tuple[float, np.ndarray]]:
    """Full spectral decomposition of a symmetric matrix via cyclic Jacobi.

    Returns (eigenvalue, unit eigenvector) pairs sorted by descending
    eigenvalue. Raises NoConvergence if the off-diagonal norm has not shrunk
    below 1e-12 of its initial value after 100 sweeps.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetric("input is not a square matrix")
    if m.shape[0] > 0 and float(np.abs(m - m.T).max()) > 1e-10:
        raise NotSymmetric("input is not symmetric within 1e-10")

    n = m.shape[0]
    a = m.copy()
    v = np.eye(n)
    off0 = _off_norm(a)

    if n > 1 and off0 > 0.0:
        for _ in range(MAX_SWEEPS):
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if abs(theta) > 1e12:
                        t = 1.0 / (2.0 * theta)
                    else:
                        t = math.copysign(1.0, theta) / (
                            abs(theta) + math.sqrt(theta * theta + 1.0)
                        )
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    # a <- J^T a J with the rotation in the (p, q) plane
                    ap, aq = a[:, p].copy(), a[:, q].copy()
                    a[:, p] = c * ap - s * aq
                    a[:, q] = s * ap + c * aq
                    ap, aq = a[p, :].copy(), a[q, :].copy()
                    a[p, :] = c * ap - s * aq
                    a[q, :] = s * ap + c * aq
                    a[p, q] = a[q, p] = 0.0
                    vp, vq = v[:, p].copy(), v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
            off = _off_norm(a)
            if off == 0.0 or off < OFF_DIAGONAL_SHRINK * off0:
                break
        else:
            raise NoConvergence(
                f"Jacobi sweep cap ({MAX_SWEEPS}) reached", off_norm=_off_norm(a)
            )

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return [(float(values[i]), _fix_sign(v[:, i].copy())) for i in order]


@dataclass
class PcaModel:
    """Orthonormal component basis fit on a standardized matrix.

    ``eigenvalues`` holds the full descending spectrum (negatives clamped to
    zero); ``components`` and ``explained_variance_ratio`` cover only the
    retained leading components.
    """

    components: np.ndarray  # n_components x n_cols, orthonormal rows
    eigenvalues: list[float]
    explained_variance_ratio: list[float]
    col_means: list[float]
    col_names: list[str]

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def to_dict(self) -> dict:
        return {
            "components": self.components.tolist(),
            "eigenvalues": self.eigenvalues,
            "explained_variance_ratio": self.explained_variance_ratio,
            "col_means": self.col_means,
            "col_names": self.col_names,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PcaModel":
        return cls(
            components=np.asarray(d["components"], dtype=np.float64),
            eigenvalues=[float(x) for x in d["eigenvalues"]],
            explained_variance_ratio=[float(x) for x in d["explained_variance_ratio"]],
            col_means=[float(x) for x in d["col_means"]],
            col_names=list(d["col_names"]),
        )


def pca_fit(
    matrix: FeatureMatrix,
    variance_target: float = 0.90,
    n_components: int | None = None,
) -> PcaModel:
    """Fit PCA, retaining the fewest leading components reaching the target.

    The caller is responsible for standardizing first; this is asserted by a
    column-mean check. Pass ``n_components`` to pin the count exactly.
    """
    means = matrix.values.mean(axis=0)
    if float(np.abs(means).max()) > 1e-8:
        raise NotStandardized(
            "columns are not centered; run zscore first",
            max_abs_mean=float(np.abs(means).max()),
        )

    pairs = eigen_symmetric(covariance(matrix))
    eigenvalues = np.array([max(val, 0.0) for val, _ in pairs])
    total = float(eigenvalues.sum())
    if total <= 0.0:
        raise AllColumnsConstant("matrix has zero total variance")
    ratios = eigenvalues / total

    if n_components is not None:
        if not 1 <= n_components <= matrix.n_cols:
            raise DimensionMismatch(
                f"n_components must be in [1, {matrix.n_cols}], got {n_components}"
            )
        m = n_components
    else:
        cumulative = np.cumsum(ratios)
        m = int(np.searchsorted(cumulative, variance_target - 1e-12) + 1)
        m = min(m, matrix.n_cols)

    return PcaModel(
        components=np.vstack([vec for _, vec in pairs[:m]]),
        eigenvalues=eigenvalues.tolist(),
        explained_variance_ratio=ratios[:m].tolist(),
        col_means=means.tolist(),
        col_names=list(matrix.col_names),
    )


def project(model: PcaModel, matrix: FeatureMatrix) -> FeatureMatrix:
    """Center rows on the fit means and drop them onto the component basis."""
    if matrix.n_cols != model.components.shape[1]:
        raise DimensionMismatch(
            f"matrix has {matrix.n_cols} columns, model expects "
            f"{model.components.shape[1]}"
        )
    scores = (matrix.values - np.asarray(model.col_means)) @ model.components.T
    names = [f"pc_{i + 1}" for i in range(model.n_components)]
    return FeatureMatrix(scores, list(matrix.row_ids), names)


def reconstruct(model: PcaModel, scores: FeatureMatrix) -> FeatureMatrix:
    """Invert project(); exact within 1e-8 when all components were retained."""
    if scores.n_cols != model.n_components:
        raise DimensionMismatch(
            f"scores have {scores.n_cols} columns, model has "
            f"{model.n_components} components"
        )
    values = scores.values @ model.components + np.asarray(model.col_means)
    return FeatureMatrix(values, list(scores.row_ids), list(model.col_names))


def biplot_data(model: PcaModel, top_n: int) -> list[tuple[str, float, float]]:
    """Per-feature loadings on the first two components, strongest first."""
    if model.n_components < 2:
        raise TooFewComponents(
            f"biplot needs 2 components, model has {model.n_components}"
        )
    loadings = [
        (name, float(model.components[0, j]), float(model.components[1, j]))
        for j, name in enumerate(model.col_names)
    ]
    loadings.sort(key=lambda r: (-(r[1] * r[1] + r[2] * r[2]), r[0]))
    return loadings[:top_n]
