"""Raw table loading and crosswalk-based aggregation to county level."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (
    EmptyTable,
    HeaderMismatch,
    InvalidCrosswalk,
    InvalidDescriptor,
    MissingFile,
    NoOverlap,
)
from .descriptors import ColumnSpec, DatasetDescriptor

logger = logging.getLogger(__name__)

POINT_CELL_RESOLUTION = 0.1  # degrees; crosswalk source keys use this grid


def point_cell_key(lat: float, lon: float) -> str:
    """Grid-cell key for a coordinate, e.g. "33.5,-84.4" (0.1 degree cells)."""
    lat = round(lat, 1) + 0.0  # +0.0 normalizes -0.0
    lon = round(lon, 1) + 0.0
    return f"{lat:.1f},{lon:.1f}"


def _normalize_code(raw: str) -> str | None:
    """5-digit zero-padded fips/zip, or None when unusable."""
    raw = raw.strip()
    if not raw or not raw.isdigit() or len(raw) > 5:
        return None
    return raw.zfill(5)


@dataclass
class RawTable:
    """Parsed rows of one source dataset, keyed by fips, zip, or point cell."""

    dataset_id: str
    key_kind: str  # fips | zip | point
    columns: list[ColumnSpec]
    rows: list[tuple[str, dict]]  # (key, column name -> value or None)
    parse_warnings: int = 0
    key_warnings: int = 0
    dropped_keys: int = 0  # rows lost to crosswalk misses during aggregation

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def numeric_columns(self) -> list[ColumnSpec]:
        return [c for c in self.columns if c.kind == "numeric"]


def load_table(descriptor: DatasetDescriptor, base_dir: str | Path | None = None) -> RawTable:
    """Parse one CSV per its descriptor.

    Cells of declared numeric columns that fail to parse become missing and
    bump the parse-warning tally; rows with unusable keys are skipped and
    counted separately.
    """
    path = Path(descriptor.path)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    if not path.exists():
        raise MissingFile(f"dataset {descriptor.id!r}: file not found: {path}")

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyTable(f"dataset {descriptor.id!r}: file has no header") from None
        header = [h.strip() for h in header]
        declared = descriptor.key.header_columns() + [c.name for c in descriptor.columns]
        missing = [name for name in declared if name not in header]
        if missing:
            raise HeaderMismatch(
                f"dataset {descriptor.id!r}: columns absent from header: {missing}",
                missing=missing,
            )
        index = {name: header.index(name) for name in declared}

        rows: list[tuple[str, dict]] = []
        parse_warnings = 0
        key_warnings = 0
        for record in reader:
            if not record or all(not cell.strip() for cell in record):
                continue
            record += [""] * (len(header) - len(record))  # ragged short rows

            if descriptor.key.kind == "point":
                try:
                    lat = float(record[index[descriptor.key.lat]])
                    lon = float(record[index[descriptor.key.lon]])
                except ValueError:
                    key_warnings += 1
                    continue
                key = point_cell_key(lat, lon)
            else:
                key = _normalize_code(record[index[descriptor.key.column]])
                if key is None:
                    key_warnings += 1
                    continue

            values: dict = {}
            for col in descriptor.columns:
                cell = record[index[col.name]].strip()
                if col.kind == "numeric":
                    if not cell:
                        values[col.name] = None
                    else:
                        try:
                            values[col.name] = float(cell)
                        except ValueError:
                            values[col.name] = None
                            parse_warnings += 1
                else:
                    values[col.name] = cell if cell else None
            rows.append((key, values))

    if not rows:
        raise EmptyTable(f"dataset {descriptor.id!r}: no data rows")
    if key_warnings:
        logger.warning(
            "dataset %s: skipped %d rows with unusable keys", descriptor.id, key_warnings
        )
    return RawTable(
        dataset_id=descriptor.id,
        key_kind=descriptor.key.kind,
        columns=list(descriptor.columns),
        rows=rows,
        parse_warnings=parse_warnings,
        key_warnings=key_warnings,
    )


@dataclass
class Crosswalk:
    """Weighted mapping from zip codes / grid cells to counties.

    Weights for each source key must sum to 1 within 1e-9.
    """

    mapping: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    def __post_init__(self):
        bad = []
        for source_key, pairs in self.mapping.items():
            total = sum(w for _, w in pairs)
            if abs(total - 1.0) > 1e-9:
                bad.append((source_key, total))
            for fips, w in pairs:
                if not (0.0 <= w <= 1.0):
                    raise InvalidCrosswalk(
                        f"weight {w} out of [0,1] for source key {source_key!r}"
                    )
                if len(fips) != 5 or not fips.isdigit():
                    raise InvalidCrosswalk(f"malformed fips {fips!r}")
        if bad:
            raise InvalidCrosswalk(
                f"weights do not sum to 1 for {len(bad)} source key(s)",
                offenders=[k for k, _ in bad[:20]],
            )

    def __contains__(self, source_key: str) -> bool:
        return source_key in self.mapping


def load_crosswalk(path: str | Path) -> Crosswalk:
    """Read a crosswalk CSV with columns source_key,fips,weight."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"crosswalk file not found: {path}")
    mapping: dict[str, list[tuple[str, float]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InvalidCrosswalk("crosswalk file is empty") from None
        required = ["source_key", "fips", "weight"]
        if [h for h in required if h not in header]:
            raise HeaderMismatch(
                f"crosswalk header must contain {required}, got {header}"
            )
        idx = {name: header.index(name) for name in required}
        for record in reader:
            if not record or all(not c.strip() for c in record):
                continue
            source_key = record[idx["source_key"]].strip()
            fips = _normalize_code(record[idx["fips"]])
            if fips is None:
                raise InvalidCrosswalk(f"malformed fips {record[idx['fips']]!r}")
            try:
                weight = float(record[idx["weight"]])
            except ValueError:
                raise InvalidCrosswalk(
                    f"malformed weight {record[idx['weight']]!r}"
                ) from None
            mapping.setdefault(source_key, []).append((fips, weight))
    if not mapping:
        raise InvalidCrosswalk("crosswalk has no rows")
    return Crosswalk(mapping)


def aggregate_by_crosswalk(table: RawTable, crosswalk: Crosswalk) -> RawTable:
    """Roll a zip- or point-keyed table up to county level.

    ``sum`` columns distribute each source value by weight; ``mean`` and
    ``population-weighted-mean`` columns average values weighted by the
    crosswalk weight. Non-numeric columns cannot be aggregated and are
    dropped. Rows whose key has no crosswalk entry are counted as dropped.
    """
    if table.key_kind == "fips":
        raise InvalidDescriptor(
            f"dataset {table.dataset_id!r} is already county-keyed"
        )
    numeric = table.numeric_columns()
    skipped = [c.name for c in table.columns if c.kind != "numeric"]
    if skipped:
        logger.warning(
            "dataset %s: dropping non-numeric columns during aggregation: %s",
            table.dataset_id,
            skipped,
        )

    sums: dict[str, dict[str, float]] = {c.name: {} for c in numeric}
    weights: dict[str, dict[str, float]] = {c.name: {} for c in numeric}
    matched = 0
    dropped = 0
    for key, values in table.rows:
        pairs = crosswalk.mapping.get(key)
        if not pairs:
            dropped += 1
            continue
        matched += 1
        for col in numeric:
            v = values.get(col.name)
            if v is None:
                continue
            for fips, w in pairs:
                sums[col.name][fips] = sums[col.name].get(fips, 0.0) + w * v
                weights[col.name][fips] = weights[col.name].get(fips, 0.0) + w

    if matched == 0:
        raise NoOverlap(
            f"dataset {table.dataset_id!r}: no keys matched the crosswalk"
        )
    if dropped:
        logger.warning(
            "dataset %s: %d rows had keys outside the crosswalk", table.dataset_id, dropped
        )

    all_fips = sorted({f for col in numeric for f in sums[col.name]})
    rows = []
    for fips in all_fips:
        values = {}
        for col in numeric:
            if fips not in sums[col.name]:
                values[col.name] = None
            elif col.aggregation == "sum":
                values[col.name] = sums[col.name][fips]
            else:
                values[col.name] = sums[col.name][fips] / weights[col.name][fips]
        rows.append((fips, values))

    return RawTable(
        dataset_id=table.dataset_id,
        key_kind="fips",
        columns=numeric,
        rows=rows,
        parse_warnings=table.parse_warnings,
        key_warnings=table.key_warnings,
        dropped_keys=dropped,
    )
