"""Dataset descriptors: what each source file contains and how to key it."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import InvalidDescriptor, MissingFile

COLUMN_KINDS = {"numeric", "categorical", "identifier"}
AGGREGATIONS = {"mean", "sum", "population-weighted-mean"}
KEY_KINDS = {"fips", "zip", "point"}
CATEGORICAL_HANDLING = {"one_hot", "drop"}


@dataclass
class ColumnSpec:
    name: str
    kind: str = "numeric"
    aggregation: str = "mean"
    units: str | None = None
    categorical_handling: str = "one_hot"

    def __post_init__(self):
        if self.kind not in COLUMN_KINDS:
            raise InvalidDescriptor(f"unknown column kind {self.kind!r} for {self.name!r}")
        if self.aggregation not in AGGREGATIONS:
            raise InvalidDescriptor(
                f"unknown aggregation {self.aggregation!r} for {self.name!r}"
            )
        if self.categorical_handling not in CATEGORICAL_HANDLING:
            raise InvalidDescriptor(
                f"unknown categorical handling {self.categorical_handling!r}"
            )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "aggregation": self.aggregation,
            "units": self.units,
            "categorical_handling": self.categorical_handling,
        }


@dataclass
class KeySpec:
    """How rows are keyed: a fips/zip column, or a lat/lon pair for points."""

    kind: str
    column: str | None = None  # fips / zip
    lat: str | None = None  # point
    lon: str | None = None

    def __post_init__(self):
        if self.kind not in KEY_KINDS:
            raise InvalidDescriptor(f"unknown key kind {self.kind!r}")
        if self.kind == "point":
            if not self.lat or not self.lon:
                raise InvalidDescriptor("point key needs lat and lon column names")
        else:
            if self.column is None:
                self.column = self.kind  # conventional default column name
        if self.kind != "point" and (self.lat or self.lon):
            raise InvalidDescriptor("lat/lon only apply to point keys")

    def header_columns(self) -> list[str]:
        if self.kind == "point":
            return [self.lat, self.lon]
        return [self.column]

    def to_dict(self) -> dict:
        if self.kind == "point":
            return {"kind": self.kind, "lat": self.lat, "lon": self.lon}
        return {"kind": self.kind, "column": self.column}


@dataclass
class DatasetDescriptor:
    id: str
    path: str
    key: KeySpec
    columns: list[ColumnSpec] = field(default_factory=list)

    def __post_init__(self):
        if not self.id:
            raise InvalidDescriptor("dataset id must be non-empty")
        if not self.columns:
            raise InvalidDescriptor(f"dataset {self.id!r} declares no columns")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise InvalidDescriptor(f"dataset {self.id!r} declares duplicate columns")
        overlap = set(names) & set(self.key.header_columns())
        if overlap:
            raise InvalidDescriptor(
                f"dataset {self.id!r} declares key column(s) {sorted(overlap)} as data"
            )

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetDescriptor":
        key = d.get("key")
        if not isinstance(key, dict) or "kind" not in key:
            raise InvalidDescriptor(f"dataset {d.get('id')!r} has no usable key spec")
        return cls(
            id=d.get("id", ""),
            path=d.get("path", ""),
            key=KeySpec(**key),
            columns=[ColumnSpec(**c) for c in d.get("columns", [])],
        )


def load_descriptors(path: str | Path) -> list[DatasetDescriptor]:
    """Read a JSON list of dataset descriptors; ids must be unique."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"descriptor file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidDescriptor(f"descriptor file is not valid JSON: {e}") from e
    if not isinstance(raw, list) or not raw:
        raise InvalidDescriptor("descriptor file must hold a non-empty JSON list")
    descriptors = [DatasetDescriptor.from_dict(d) for d in raw]
    ids = [d.id for d in descriptors]
    if len(set(ids)) != len(ids):
        raise InvalidDescriptor("dataset ids must be unique")
    return descriptors
