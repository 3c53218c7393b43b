"""End-to-end orchestration: config, ingest run, and analysis run."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .bundle import AnalysisBundle
from .cluster import best_of_restarts, silhouette, sweep_k
from .ingest import (
    aggregate_by_crosswalk,
    drop_sparse_columns,
    filter_sparse_rows,
    impute_median,
    join_on_fips,
    load_crosswalk,
    load_descriptors,
    load_table,
)
from .ingest.master import MasterTable, dedup_count
from .interpret import build_report
from .pca import pca_fit, project
from .preprocess import zscore

logger = logging.getLogger(__name__)

DEFAULT_OUTCOME_FEATURES = [
    "positivity_rate",
    "confirmed_cases_per_person",
    "deaths_per_person",
]


@dataclass
class RunConfig:
    """Everything that affects a pipeline run; hashed into the bundle meta."""

    datasets_path: str = "datasets.json"
    crosswalk_path: str | None = None
    column_threshold: float = 0.5
    row_threshold: float = 0.25
    variance_target: float = 0.90
    use_pca: bool = True
    k_min: int = 2
    k_max: int = 20
    restarts: int = 10
    seed: int = 0
    k_override: int | None = None
    outcome_features: list[str] = field(
        default_factory=lambda: list(DEFAULT_OUTCOME_FEATURES)
    )
    lower_is_better: list[bool] | None = None  # defaults to all-lower-better
    display_features: list[str] | None = None
    exceed_threshold: float = 0.6
    out_dir: str = "out"  # excluded from to_dict/hash: it cannot affect results

    def __post_init__(self):
        if not 0.0 < self.column_threshold <= 1.0:
            raise ValueError("column_threshold must be in (0, 1]")
        if not 0.0 < self.row_threshold <= 1.0:
            raise ValueError("row_threshold must be in (0, 1]")
        if not 0.0 < self.variance_target <= 1.0:
            raise ValueError("variance_target must be in (0, 1]")
        if not 2 <= self.k_min <= self.k_max:
            raise ValueError("need 2 <= k_min <= k_max")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.k_override is not None and self.k_override < 1:
            raise ValueError("k override must be >= 1")
        if self.lower_is_better is not None and len(self.lower_is_better) != len(
            self.outcome_features
        ):
            raise ValueError("lower_is_better must align with outcome_features")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValueError("config file must hold a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {unknown}")
        config = cls(**raw)
        # resolve paths relative to the config file's directory
        base = path.parent
        config.datasets_path = str((base / config.datasets_path).resolve())
        if config.crosswalk_path is not None:
            config.crosswalk_path = str((base / config.crosswalk_path).resolve())
        config.out_dir = str((base / config.out_dir).resolve())
        return config

    def to_dict(self) -> dict:
        return {
            name: getattr(self, name)
            for name in self.__dataclass_fields__
            if name != "out_dir"
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class IngestResult:
    master: MasterTable  # post column-drop, all counties
    report: dict


def run_ingest(config: RunConfig) -> IngestResult:
    """Load all datasets, aggregate non-county tables, join, drop sparse columns."""
    descriptors = load_descriptors(config.datasets_path)
    base_dir = Path(config.datasets_path).parent

    crosswalk = None
    if any(d.key.kind != "fips" for d in descriptors):
        if config.crosswalk_path is None:
            raise ValueError("config needs crosswalk_path for zip/point datasets")
        crosswalk = load_crosswalk(config.crosswalk_path)

    tables = []
    parse_warnings = 0
    key_warnings = 0
    dropped_crosswalk_rows = 0
    for descriptor in descriptors:
        table = load_table(descriptor, base_dir=base_dir)
        if table.key_kind != "fips":
            table = aggregate_by_crosswalk(table, crosswalk)
            dropped_crosswalk_rows += table.dropped_keys
        parse_warnings += table.parse_warnings
        key_warnings += table.key_warnings
        tables.append(table)

    dedup_rows = dedup_count(tables)
    master = join_on_fips(tables)
    master, dropped_columns = drop_sparse_columns(master, config.column_threshold)

    report = {
        "datasets": len(descriptors),
        "counties": master.n_rows,
        "features": len(master.features),
        "dropped_columns": dropped_columns,
        "dedup_rows": dedup_rows,
        "parse_warnings": parse_warnings,
        "key_warnings": key_warnings,
        "dropped_crosswalk_rows": dropped_crosswalk_rows,
    }
    logger.info("ingest complete: %s", report)
    return IngestResult(master=master, report=report)


def run_analysis(
    master: MasterTable, config: RunConfig, ingest_report: dict | None = None
) -> AnalysisBundle:
    """Standardize, reduce, sweep k, fit the final model, and interpret."""
    filtered = filter_sparse_rows(
        master, config.row_threshold, min_rows=config.k_max + 1
    )
    matrix = impute_median(filtered)
    scaled, scaler = zscore(matrix)

    if config.use_pca:
        pca_model = pca_fit(scaled, variance_target=config.variance_target)
        clustered_matrix = project(pca_model, scaled)
    else:
        pca_model = None
        clustered_matrix = scaled

    sweep = sweep_k(
        clustered_matrix.values,
        k_min=config.k_min,
        k_max=config.k_max,
        restarts=config.restarts,
        seed=config.seed,
    )
    final_k = config.k_override or sweep.recommended_k
    model = best_of_restarts(
        clustered_matrix.values, final_k, restarts=config.restarts, seed=config.seed
    )
    model.row_ids = list(clustered_matrix.row_ids)
    mean_silhouette, _ = silhouette(clustered_matrix.values, model.assignments)

    lower_is_better = config.lower_is_better or [True] * len(config.outcome_features)
    report = build_report(
        master,
        clustered_matrix,
        scaled,
        model,
        outcome_features=config.outcome_features,
        lower_is_better=lower_is_better,
        exceed_threshold=config.exceed_threshold,
    )

    filtered_out = sorted(set(master.rows) - set(filtered.rows))
    meta = {
        "engine_version": __version__,
        "seed": config.seed,
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "counts": {
            "counties_master": master.n_rows,
            "counties_clustered": len(model.row_ids),
            "features_master": len(master.features),
            "features_matrix": matrix.n_cols,
            "pca_components": pca_model.n_components if pca_model else None,
        },
        "cleaning": dict(ingest_report or {}, filtered_fips=filtered_out),
        "recommended_k": sweep.recommended_k,
        "final_k": final_k,
        "sweep_low_confidence": sweep.low_confidence,
    }

    return AnalysisBundle(
        master=master,
        scaler=scaler,
        pca=pca_model,
        clusters=model,
        mean_silhouette=mean_silhouette,
        sweep=sweep,
        report=report,
        meta=meta,
    )
