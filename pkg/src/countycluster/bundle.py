"""Analysis bundle: one directory holding everything a serving process needs.

Files: master.csv, dictionary.json, scaler.json, pca.json, clusters.json,
report.json, meta.json. All JSON is written with sorted keys and repr-exact
floats, so identical runs produce byte-identical bundles.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .cluster import ClusterModel, KSweepReport
from .errors import BadOperator, IncompleteBundle, MissingBundle, UnknownFeature
from .ingest.master import MasterTable
from .interpret import InterpretationReport
from .pca import PcaModel
from .preprocess import ScalerStats

logger = logging.getLogger(__name__)

BUNDLE_FILES = [
    "master.csv",
    "dictionary.json",
    "scaler.json",
    "pca.json",
    "clusters.json",
    "report.json",
    "meta.json",
]


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


@dataclass
class AnalysisBundle:
    master: MasterTable  # all counties surviving column cleaning
    scaler: ScalerStats
    pca: PcaModel | None
    clusters: ClusterModel  # row_ids = clustered counties only
    mean_silhouette: float
    sweep: KSweepReport
    report: InterpretationReport
    meta: dict

    def __post_init__(self):
        if self.clusters.row_ids is None:
            raise IncompleteBundle("cluster model carries no row ids")
        missing = [f for f in self.clusters.row_ids if f not in self.master.rows]
        if missing:
            raise IncompleteBundle(
                f"{len(missing)} clustered counties absent from master",
                examples=missing[:5],
            )

    def clustered_fips(self) -> list[str]:
        return list(self.clusters.row_ids)

    def assignments_by_fips(self) -> dict[str, int]:
        return {
            fips: int(c)
            for fips, c in zip(self.clusters.row_ids, self.clusters.assignments)
        }

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        self.master.write(directory / "master.csv", directory / "dictionary.json")
        _write_json(directory / "scaler.json", self.scaler.to_dict())
        _write_json(
            directory / "pca.json",
            {"enabled": self.pca is not None, "model": self.pca.to_dict() if self.pca else None},
        )
        _write_json(
            directory / "clusters.json",
            {
                "model": self.clusters.to_dict(),
                "mean_silhouette": self.mean_silhouette,
                "sweep": self.sweep.to_dict(),
            },
        )
        _write_json(directory / "report.json", self.report.to_dict())
        _write_json(directory / "meta.json", self.meta)
        logger.info("bundle written to %s", directory)

    @classmethod
    def load(cls, directory: str | Path) -> "AnalysisBundle":
        directory = Path(directory)
        if not directory.is_dir():
            raise MissingBundle(f"bundle directory not found: {directory}")
        missing = [name for name in BUNDLE_FILES if not (directory / name).exists()]
        if missing:
            raise IncompleteBundle(
                f"bundle at {directory} is missing files: {missing}", missing=missing
            )

        master = MasterTable.read(directory / "master.csv", directory / "dictionary.json")
        scaler = ScalerStats.from_dict(_read_json(directory / "scaler.json"))
        pca_payload = _read_json(directory / "pca.json")
        pca = PcaModel.from_dict(pca_payload["model"]) if pca_payload["enabled"] else None
        clusters_payload = _read_json(directory / "clusters.json")
        return cls(
            master=master,
            scaler=scaler,
            pca=pca,
            clusters=ClusterModel.from_dict(clusters_payload["model"]),
            mean_silhouette=float(clusters_payload["mean_silhouette"]),
            sweep=KSweepReport.from_dict(clusters_payload["sweep"]),
            report=InterpretationReport.from_dict(_read_json(directory / "report.json")),
            meta=_read_json(directory / "meta.json"),
        )


def _read_json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def export_assignments(bundle: AnalysisBundle) -> dict:
    """Choropleth-ready map: every master fips -> cluster, label, display values.

    Counties excluded by row filtering appear with cluster null and reason
    "filtered". Key order is ascending fips for stable re-exports.
    """
    assignments = bundle.assignments_by_fips()
    labels = bundle.report.performance.labels
    display = bundle.meta.get("config", {}).get("display_features") or list(
        bundle.report.performance.outcome_features
    )
    display = [f for f in display if f in bundle.master.features]

    out = {}
    for fips in bundle.master.fips_list():
        row = bundle.master.rows[fips]
        cluster = assignments.get(fips)
        entry = {
            "cluster": cluster,
            "performance_label": labels[cluster] if cluster is not None else None,
            "state": row.state,
            "county_name": row.county_name,
            "values": {f: row.cells.get(f) for f in display},
        }
        if cluster is None:
            entry["reason"] = "filtered"
        out[fips] = entry
    return out


def write_assignments(bundle: AnalysisBundle, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(export_assignments(bundle), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


@dataclass
class DistributionResult:
    feature: str
    op: str
    threshold: float
    counts: dict[int, int]  # cluster -> counties passing the predicate
    missing: int  # clustered counties missing the feature value
    total_clustered: int

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "op": self.op,
            "threshold": self.threshold,
            "counts": {str(c): n for c, n in self.counts.items()},
            "missing": self.missing,
            "total_clustered": self.total_clustered,
        }


def filter_distribution(
    bundle: AnalysisBundle, feature: str, op: str, threshold: float
) -> DistributionResult:
    """Per-cluster counts of clustered counties passing a threshold predicate.

    Counties missing the feature are excluded from the counts and tallied
    separately, so counts + missing never exceeds the clustered total.
    """
    if feature not in bundle.master.features:
        raise UnknownFeature(f"unknown feature {feature!r}")
    if op not in ("gte", "lte"):
        raise BadOperator(f"operator must be gte or lte, got {op!r}")

    counts = {c: 0 for c in range(bundle.clusters.k)}
    missing = 0
    for fips, cluster in bundle.assignments_by_fips().items():
        value = bundle.master.rows[fips].cells.get(feature)
        if value is None:
            missing += 1
            continue
        passes = value >= threshold if op == "gte" else value <= threshold
        if passes:
            counts[cluster] += 1
    return DistributionResult(
        feature=feature,
        op=op,
        threshold=threshold,
        counts=counts,
        missing=missing,
        total_clustered=len(bundle.clusters.row_ids),
    )
