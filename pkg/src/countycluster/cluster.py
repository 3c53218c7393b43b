"""K-Means clustering with seeded restarts, model-selection diagnostics, and
an exhaustive small-instance oracle.

Determinism contract: every function here is a pure function of its inputs
and the seed. Restart r of a sweep cell (k, r) draws from
``np.random.default_rng([seed, k, r])``, so restart sets are nested: the
best-of-restarts inertia can only improve as the restart count grows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    KRangeInvalid,
    KTooLarge,
    ShapeMismatch,
    SingleCluster,
    TooFewEntries,
    TooManyRows,
)

logger = logging.getLogger(__name__)

ORACLE_MAX_ROWS = 10


@dataclass
class ClusterModel:
    """A fitted K-Means solution plus convergence metadata."""

    k: int
    centroids: np.ndarray  # k x d
    assignments: np.ndarray  # n, values in [0, k)
    inertia: float
    iterations: int
    seed: int | None
    converged: bool
    inertia_history: list[float] = field(default_factory=list)
    row_ids: list[str] | None = None  # set by the pipeline; fips per row

    def cluster_sizes(self) -> list[int]:
        return np.bincount(self.assignments, minlength=self.k).tolist()

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "centroids": self.centroids.tolist(),
            "assignments": self.assignments.tolist(),
            "inertia": self.inertia,
            "iterations": self.iterations,
            "seed": self.seed,
            "converged": self.converged,
            "inertia_history": self.inertia_history,
            "row_ids": self.row_ids,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClusterModel":
        return cls(
            k=int(d["k"]),
            centroids=np.asarray(d["centroids"], dtype=np.float64),
            assignments=np.asarray(d["assignments"], dtype=np.int64),
            inertia=float(d["inertia"]),
            iterations=int(d["iterations"]),
            seed=d.get("seed"),
            converged=bool(d["converged"]),
            inertia_history=[float(x) for x in d.get("inertia_history", [])],
            row_ids=list(d["row_ids"]) if d.get("row_ids") is not None else None,
        )


def _as_points(matrix) -> np.ndarray:
    points = np.asarray(getattr(matrix, "values", matrix), dtype=np.float64)
    if points.ndim != 2:
        raise ShapeMismatch("points must be a 2-D array")
    return points


def _sq_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """n x k squared Euclidean distances via the Gram expansion."""
    d2 = (
        (points * points).sum(axis=1)[:, None]
        + (centers * centers).sum(axis=1)[None, :]
        - 2.0 * points @ centers.T
    )
    return np.maximum(d2, 0.0)


def inertia(matrix, centroids: np.ndarray, assignments: np.ndarray) -> float:
    """Total within-cluster sum of squared Euclidean distances."""
    points = _as_points(matrix)
    centroids = np.asarray(centroids, dtype=np.float64)
    assignments = np.asarray(assignments)
    if assignments.shape[0] != points.shape[0]:
        raise ShapeMismatch("assignments length does not match points")
    if centroids.ndim != 2 or centroids.shape[1] != points.shape[1]:
        raise ShapeMismatch("centroid dimension does not match points")
    if assignments.size and (assignments.min() < 0 or assignments.max() >= len(centroids)):
        raise ShapeMismatch("assignment index out of range")
    diffs = points - centroids[assignments]
    return float((diffs * diffs).sum())


def kmeans_pp_init(matrix, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: spread initial centroids by D^2-weighted sampling."""
    points = _as_points(matrix)
    n = points.shape[0]
    if k < 1:
        raise KRangeInvalid(f"k must be >= 1, got {k}")
    n_distinct = np.unique(points, axis=0).shape[0]
    if k > n_distinct:
        raise KTooLarge(f"k={k} exceeds {n_distinct} distinct rows")

    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = points[first]
    closest_d2 = _sq_distances(points, centroids[:1])[:, 0]
    for i in range(1, k):
        probs = closest_d2 / closest_d2.sum()
        idx = int(rng.choice(n, p=probs))
        centroids[i] = points[idx]
        d2_new = _sq_distances(points, centroids[i : i + 1])[:, 0]
        np.minimum(closest_d2, d2_new, out=closest_d2)
    return centroids


def lloyd(
    matrix,
    init_centroids: np.ndarray,
    max_iter: int = 300,
    tol: float = 1e-9,
) -> ClusterModel:
    """Lloyd iterations from the given centroids until the max centroid shift
    drops below ``tol`` or ``max_iter`` is hit.

    Assignment ties go to the lowest cluster index. An emptied cluster is
    repaired by reseeding its centroid at the point farthest from it (taken
    from a cluster that keeps at least one member). Inertia is checked to be
    non-increasing on every iteration without a repair.
    """
    points = _as_points(matrix)
    centroids = np.asarray(init_centroids, dtype=np.float64).copy()
    if centroids.ndim != 2 or centroids.shape[1] != points.shape[1]:
        raise ShapeMismatch("init centroids dimension does not match points")
    k = centroids.shape[0]
    n = points.shape[0]
    if k > n:
        raise KTooLarge(f"k={k} exceeds {n} rows")

    history: list[float] = []
    assignments = np.zeros(n, dtype=np.int64)
    converged = False
    iterations = 0

    for _ in range(max_iter):
        d2 = _sq_distances(points, centroids)
        assignments = np.argmin(d2, axis=1)  # argmin takes the lowest index on ties

        repaired = False
        for _ in range(k):
            sizes = np.bincount(assignments, minlength=k)
            empty = np.flatnonzero(sizes == 0)
            if empty.size == 0:
                break
            j = int(empty[0])
            donors = sizes[assignments] >= 2
            if not donors.any():
                raise KTooLarge(f"cannot populate {k} clusters from {n} rows")
            dist_j = np.where(donors, d2[:, j], -np.inf)
            assignments[int(np.argmax(dist_j))] = j
            repaired = True

        new_centroids = np.empty_like(centroids)
        for j in range(k):
            new_centroids[j] = points[assignments == j].mean(axis=0)

        diffs = points - new_centroids[assignments]
        current = float((diffs * diffs).sum())
        if history and not repaired and current > history[-1] * (1.0 + 1e-12):
            raise RuntimeError(
                f"inertia increased {history[-1]!r} -> {current!r} without a repair"
            )
        history.append(current)

        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        iterations += 1
        if shift < tol:
            converged = True
            break

    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=assignments,
        inertia=history[-1],
        iterations=iterations,
        seed=None,
        converged=converged,
        inertia_history=history,
    )


def silhouette(matrix, assignments: np.ndarray) -> tuple[float, list[float]]:
    """Mean and per-point silhouette scores.

    s = (b - a) / max(a, b), where a is the mean intra-cluster distance
    (excluding self) and b the smallest mean distance to another cluster.
    Points in singleton clusters score 0 by convention.
    """
    points = _as_points(matrix)
    assignments = np.asarray(assignments)
    n = points.shape[0]
    if assignments.shape[0] != n:
        raise ShapeMismatch("assignments length does not match points")
    labels = np.unique(assignments)
    if labels.size < 2:
        raise SingleCluster("silhouette needs at least 2 clusters")

    dist = np.sqrt(_sq_distances(points, points))
    scores = np.zeros(n, dtype=np.float64)
    masks = {int(c): assignments == c for c in labels}
    sizes = {c: int(m.sum()) for c, m in masks.items()}

    for i in range(n):
        own = int(assignments[i])
        if sizes[own] == 1:
            continue  # singleton convention: s = 0
        a = dist[i, masks[own]].sum() / (sizes[own] - 1)
        b = min(
            dist[i, mask].mean() for c, mask in masks.items() if c != own
        )
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom

    return float(scores.mean()), scores.tolist()


@dataclass
class KSweepEntry:
    k: int
    best_inertia: float
    mean_silhouette: float
    restarts_used: int


@dataclass
class KSweepReport:
    entries: list[KSweepEntry]
    recommended_k: int
    low_confidence: bool = False

    def to_dict(self) -> dict:
        return {
            "entries": [vars(e) for e in self.entries],
            "recommended_k": self.recommended_k,
            "low_confidence": self.low_confidence,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KSweepReport":
        return cls(
            entries=[KSweepEntry(**e) for e in d["entries"]],
            recommended_k=int(d["recommended_k"]),
            low_confidence=bool(d.get("low_confidence", False)),
        )


@dataclass
class ElbowResult:
    k: int
    low_confidence: bool


def elbow_point(report: KSweepReport) -> ElbowResult:
    """Pick k at the point of maximum bend in the inertia curve.

    Both axes are min-max normalized; the elbow is the point with the largest
    perpendicular distance to the chord joining the first and last sweep
    points. A flat (collinear) curve yields the first interior k flagged
    low-confidence.
    """
    entries = report.entries if isinstance(report, KSweepReport) else list(report)
    if len(entries) < 3:
        raise TooFewEntries(f"elbow needs at least 3 sweep entries, got {len(entries)}")
    ks = np.array([e.k for e in entries], dtype=np.float64)
    inertias = np.array([e.best_inertia for e in entries], dtype=np.float64)

    x = (ks - ks[0]) / (ks[-1] - ks[0])
    span = inertias.max() - inertias.min()
    y = np.zeros_like(inertias) if span == 0.0 else (inertias - inertias.min()) / span

    # |cross((p1 - p0), (p - p0))| / |p1 - p0|
    dx, dy = x[-1] - x[0], y[-1] - y[0]
    chord = np.hypot(dx, dy)
    distances = np.abs(dx * (y - y[0]) - dy * (x - x[0])) / chord
    interior = distances[1:-1]
    low_confidence = float(interior.max()) < 1e-9
    best = 1 if low_confidence else int(np.argmax(interior)) + 1
    return ElbowResult(k=int(entries[best].k), low_confidence=low_confidence)


def best_of_restarts(matrix, k: int, restarts: int, seed: int) -> ClusterModel:
    """Lowest-inertia Lloyd fit over ``restarts`` seeded k-means++ starts."""
    points = _as_points(matrix)
    best: ClusterModel | None = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, k, r])
        model = lloyd(points, kmeans_pp_init(points, k, rng))
        if best is None or model.inertia < best.inertia:
            best = model
    assert best is not None
    best.seed = seed
    return best


def sweep_k(
    matrix,
    k_min: int = 2,
    k_max: int = 20,
    restarts: int = 10,
    seed: int = 0,
) -> KSweepReport:
    """Fit best-of-restarts models for every k in [k_min, k_max] and pick a
    recommended k via the elbow criterion."""
    points = _as_points(matrix)
    if k_min < 2 or k_min > k_max:
        raise KRangeInvalid(f"need 2 <= k_min <= k_max, got [{k_min}, {k_max}]")
    if k_max >= points.shape[0]:
        raise KRangeInvalid(f"k_max={k_max} must be below n_rows={points.shape[0]}")

    entries = []
    for k in range(k_min, k_max + 1):
        model = best_of_restarts(points, k, restarts, seed)
        mean_sil, _ = silhouette(points, model.assignments)
        entries.append(
            KSweepEntry(
                k=k,
                best_inertia=model.inertia,
                mean_silhouette=mean_sil,
                restarts_used=restarts,
            )
        )

    report = KSweepReport(entries=entries, recommended_k=entries[0].k)
    if len(entries) >= 3:
        result = elbow_point(report)
        report.recommended_k = result.k
        report.low_confidence = result.low_confidence
    elif len(entries) == 2:
        report.low_confidence = True
    return report


def sweep_csv(report: KSweepReport) -> str:
    """CSV rendering of the sweep (k, inertia, silhouette) for plotting."""
    lines = ["k,inertia,silhouette"]
    for e in report.entries:
        lines.append(f"{e.k},{e.best_inertia!r},{e.mean_silhouette!r}")
    return "\n".join(lines) + "\n"


def _partitions_into_k(n: int, k: int):
    """Yield assignment tuples for all partitions of range(n) into exactly k
    non-empty blocks (restricted growth strings)."""
    assign = [0] * n

    def rec(i: int, used: int):
        if i == n:
            if used == k:
                yield tuple(assign)
            return
        if used + (n - i) < k:
            return  # not enough items left to open the remaining blocks
        for b in range(min(used + 1, k)):
            assign[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(0, 0)


def exact_oracle(matrix, k: int) -> tuple[list[list[int]], float]:
    """Minimum-inertia partition by exhaustive enumeration (n <= 10 rows).

    Returns the best partition as sorted index blocks plus its inertia, with
    centroids implicitly at block means. Brute force by construction; used to
    verify Lloyd solutions on small instances.
    """
    points = _as_points(matrix)
    n = points.shape[0]
    if n > ORACLE_MAX_ROWS:
        raise TooManyRows(f"oracle handles n <= {ORACLE_MAX_ROWS}, got {n}")
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} invalid for {n} rows")

    best_assign = None
    best_inertia = np.inf
    for assign in _partitions_into_k(n, k):
        labels = np.asarray(assign)
        total = 0.0
        for b in range(k):
            block = points[labels == b]
            diffs = block - block.mean(axis=0)
            total += float((diffs * diffs).sum())
        if total < best_inertia:
            best_inertia = total
            best_assign = labels
    assert best_assign is not None
    blocks = [sorted(np.flatnonzero(best_assign == b).tolist()) for b in range(k)]
    blocks.sort(key=lambda b: b[0])
    return blocks, float(best_inertia)


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-corrected agreement between two partitions of the same rows."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise ShapeMismatch("label arrays must have the same length")
    n = a.shape[0]

    def comb2(x):
        return x * (x - 1) / 2.0

    _, a_idx = np.unique(a, return_inverse=True)
    _, b_idx = np.unique(b, return_inverse=True)
    contingency = np.zeros((a_idx.max() + 1, b_idx.max() + 1))
    np.add.at(contingency, (a_idx, b_idx), 1)

    sum_cells = comb2(contingency).sum()
    sum_a = comb2(contingency.sum(axis=1)).sum()
    sum_b = comb2(contingency.sum(axis=0)).sum()
    expected = sum_a * sum_b / comb2(n)
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))
