"""The fused county x feature master table and its cleaning operations."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import (
    AllColumnsDropped,
    EmptyColumn,
    InvalidDescriptor,
    MissingFile,
    TooFewRows,
)
from ..matrix import FeatureMatrix
from .tables import RawTable

logger = logging.getLogger(__name__)

IDENTIFIER_STATE = "state"
IDENTIFIER_COUNTY = "county_name"


@dataclass
class FeatureInfo:
    kind: str
    aggregation: str
    source: str  # dataset id (provenance)
    units: str | None = None
    categorical_handling: str = "one_hot"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "aggregation": self.aggregation,
            "source": self.source,
            "units": self.units,
            "categorical_handling": self.categorical_handling,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureInfo":
        return cls(
            kind=d["kind"],
            aggregation=d["aggregation"],
            source=d["source"],
            units=d.get("units"),
            categorical_handling=d.get("categorical_handling", "one_hot"),
        )


@dataclass
class CountyRow:
    fips: str
    state: str
    county_name: str
    cells: dict  # feature -> float | str | None


@dataclass
class MasterTable:
    """Rows keyed by 5-digit fips; cells hold per-feature optional values."""

    rows: dict[str, CountyRow]
    features: list[str]
    feature_info: dict[str, FeatureInfo] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def fips_list(self) -> list[str]:
        return sorted(self.rows)

    def provenance(self) -> dict[str, str]:
        return {name: info.source for name, info in self.feature_info.items()}

    def missing_fraction(self, feature: str) -> float:
        if not self.rows:
            return 1.0
        missing = sum(1 for row in self.rows.values() if row.cells.get(feature) is None)
        return missing / len(self.rows)

    def column_values(self, feature: str) -> list:
        return [self.rows[f].cells.get(feature) for f in self.fips_list()]

    # --- persistence --------------------------------------------------------

    def write(self, master_path: str | Path, dictionary_path: str | Path) -> None:
        """Write master.csv (missing cells empty) plus the data dictionary.

        Output is byte-deterministic: rows sorted by fips, floats rendered
        with repr so reloads are exact.
        """
        master_path = Path(master_path)
        with open(master_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["fips", IDENTIFIER_STATE, IDENTIFIER_COUNTY] + self.features)
            for fips in self.fips_list():
                row = self.rows[fips]
                cells = []
                for feature in self.features:
                    v = row.cells.get(feature)
                    if v is None:
                        cells.append("")
                    elif isinstance(v, float):
                        cells.append(repr(v))
                    else:
                        cells.append(str(v))
                writer.writerow([fips, row.state, row.county_name] + cells)

        dictionary = {
            "key": "fips",
            "identifiers": [IDENTIFIER_STATE, IDENTIFIER_COUNTY],
            "features": {
                name: self.feature_info[name].to_dict() for name in self.features
            },
        }
        Path(dictionary_path).write_text(
            json.dumps(dictionary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def read(cls, master_path: str | Path, dictionary_path: str | Path) -> "MasterTable":
        master_path, dictionary_path = Path(master_path), Path(dictionary_path)
        for p in (master_path, dictionary_path):
            if not p.exists():
                raise MissingFile(f"file not found: {p}")
        dictionary = json.loads(dictionary_path.read_text(encoding="utf-8"))
        feature_info = {
            name: FeatureInfo.from_dict(d) for name, d in dictionary["features"].items()
        }

        with open(master_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            features = header[3:]
            rows: dict[str, CountyRow] = {}
            for record in reader:
                fips, state, county_name = record[0], record[1], record[2]
                cells = {}
                for name, cell in zip(features, record[3:]):
                    if cell == "":
                        cells[name] = None
                    elif feature_info[name].kind == "categorical":
                        cells[name] = cell
                    else:
                        cells[name] = float(cell)
                rows[fips] = CountyRow(fips, state, county_name, cells)
        return cls(rows=rows, features=features, feature_info=feature_info)


def join_on_fips(tables: list[RawTable]) -> MasterTable:
    """Left-join county-keyed tables onto the union of all fips seen.

    Duplicate fips within one table keep the first occurrence (logged).
    Feature names colliding across datasets get a ``__<dataset id>`` suffix
    on every colliding occurrence, which keeps the join order-insensitive.
    """
    if not tables:
        raise InvalidDescriptor("join needs at least one table")
    for t in tables:
        if t.key_kind != "fips":
            raise InvalidDescriptor(
                f"dataset {t.dataset_id!r} is keyed by {t.key_kind}, not fips"
            )

    deduped: dict[str, dict[str, dict]] = {}
    for t in tables:
        seen: dict[str, dict] = {}
        dropped = 0
        for key, values in t.rows:
            if key in seen:
                dropped += 1
                continue
            seen[key] = values
        if dropped:
            logger.info("dataset %s: removed %d duplicate fips rows", t.dataset_id, dropped)
        deduped[t.dataset_id] = seen

    # rename every occurrence of a cross-dataset name collision
    owners: dict[str, list[str]] = {}
    for t in tables:
        for col in t.columns:
            if col.kind != "identifier":
                owners.setdefault(col.name, []).append(t.dataset_id)
    renames = {
        (ds, name): f"{name}__{ds}"
        for name, ds_list in owners.items()
        if len(ds_list) > 1
        for ds in ds_list
    }
    for (ds, name), new in renames.items():
        logger.info("feature %r from %s renamed to %r (name collision)", name, ds, new)

    features: list[str] = []
    feature_info: dict[str, FeatureInfo] = {}
    for t in tables:
        for col in t.columns:
            if col.kind == "identifier":
                continue
            name = renames.get((t.dataset_id, col.name), col.name)
            features.append(name)
            feature_info[name] = FeatureInfo(
                kind=col.kind,
                aggregation=col.aggregation,
                source=t.dataset_id,
                units=col.units,
                categorical_handling=col.categorical_handling,
            )

    all_fips = sorted({fips for rows in deduped.values() for fips in rows})
    # identifiers come from the lexicographically smallest dataset id that has
    # a non-empty value, keeping the join independent of input order
    id_providers = sorted(
        t.dataset_id
        for t in tables
        if any(c.kind == "identifier" for c in t.columns)
    )
    columns_by_ds = {t.dataset_id: t.columns for t in tables}

    rows: dict[str, CountyRow] = {}
    for fips in all_fips:
        state = ""
        county_name = ""
        for ds in id_providers:
            values = deduped[ds].get(fips)
            if values is None:
                continue
            for col in columns_by_ds[ds]:
                if col.kind != "identifier":
                    continue
                if col.name == IDENTIFIER_STATE and not state and values.get(col.name):
                    state = values[col.name]
                if col.name == IDENTIFIER_COUNTY and not county_name and values.get(col.name):
                    county_name = values[col.name]
        cells = {}
        for t in tables:
            values = deduped[t.dataset_id].get(fips)
            for col in t.columns:
                if col.kind == "identifier":
                    continue
                name = renames.get((t.dataset_id, col.name), col.name)
                cells[name] = values.get(col.name) if values is not None else None
        rows[fips] = CountyRow(fips, state, county_name, cells)

    return MasterTable(rows=rows, features=features, feature_info=feature_info)


def dedup_count(tables: list[RawTable]) -> int:
    """Rows that join_on_fips will discard as duplicate fips."""
    total = 0
    for t in tables:
        total += t.n_rows - len({key for key, _ in t.rows})
    return total


def drop_sparse_columns(
    master: MasterTable, threshold: float = 0.5
) -> tuple[MasterTable, list[str]]:
    """Remove features whose missing fraction strictly exceeds the threshold."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    dropped = [f for f in master.features if master.missing_fraction(f) > threshold]
    kept = [f for f in master.features if f not in dropped]
    if not kept:
        raise AllColumnsDropped(
            f"every feature exceeds the {threshold:.0%} missing threshold"
        )
    if dropped:
        logger.info("dropping %d sparse columns: %s", len(dropped), dropped)
    rows = {
        fips: CountyRow(
            row.fips,
            row.state,
            row.county_name,
            {f: row.cells.get(f) for f in kept},
        )
        for fips, row in master.rows.items()
    }
    info = {f: master.feature_info[f] for f in kept}
    return MasterTable(rows=rows, features=kept, feature_info=info), dropped


def filter_sparse_rows(
    master: MasterTable, row_threshold: float, min_rows: int = 2
) -> MasterTable:
    """Remove counties missing more than ``row_threshold`` of the features."""
    if not 0.0 < row_threshold <= 1.0:
        raise ValueError(f"row_threshold must be in (0, 1], got {row_threshold}")
    n_features = len(master.features)
    survivors = {}
    for fips, row in master.rows.items():
        missing = sum(1 for f in master.features if row.cells.get(f) is None)
        if missing / n_features <= row_threshold:
            survivors[fips] = row
    if len(survivors) < min_rows:
        raise TooFewRows(
            f"only {len(survivors)} rows survive the {row_threshold:.0%} filter; "
            f"need at least {min_rows}"
        )
    logger.info(
        "row filter kept %d of %d counties (threshold %.2f)",
        len(survivors),
        master.n_rows,
        row_threshold,
    )
    return MasterTable(
        rows=survivors, features=list(master.features), feature_info=dict(master.feature_info)
    )


def impute_median(master: MasterTable) -> FeatureMatrix:
    """Resolve residual missingness into a dense numeric matrix.

    Numeric gaps take the column median. Categorical features are one-hot
    encoded (sorted category order) or dropped, per their descriptor.
    """
    fips_order = master.fips_list()
    columns: list[tuple[str, np.ndarray]] = []

    for feature in master.features:
        info = master.feature_info[feature]
        raw = [master.rows[f].cells.get(feature) for f in fips_order]
        if info.kind == "categorical":
            if info.categorical_handling == "drop":
                logger.info("dropping categorical feature %r", feature)
                continue
            categories = sorted({v for v in raw if v is not None})
            if not categories:
                raise EmptyColumn(f"categorical feature {feature!r} has no values")
            for cat in categories:
                values = [
                    None if v is None else (1.0 if v == cat else 0.0) for v in raw
                ]
                columns.append((f"{feature}={cat}", _fill_median(feature, values)))
        else:
            columns.append((feature, _fill_median(feature, raw)))

    if not columns:
        raise AllColumnsDropped("no numeric columns left after encoding")
    names = [name for name, _ in columns]
    values = np.column_stack([col for _, col in columns])
    return FeatureMatrix(values, fips_order, names)


def _fill_median(feature: str, raw: list) -> np.ndarray:
    present = np.array([v for v in raw if v is not None], dtype=np.float64)
    if present.size == 0:
        raise EmptyColumn(f"feature {feature!r} has no present values")
    median = float(np.median(present))
    return np.array([median if v is None else float(v) for v in raw])
