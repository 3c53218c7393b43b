"""Load, validate, aggregate, join, and clean county-level tables."""

from .descriptors import ColumnSpec, DatasetDescriptor, KeySpec, load_descriptors
from .tables import (
    Crosswalk,
    RawTable,
    aggregate_by_crosswalk,
    load_crosswalk,
    load_table,
    point_cell_key,
)
from .master import (
    FeatureInfo,
    MasterTable,
    drop_sparse_columns,
    filter_sparse_rows,
    impute_median,
    join_on_fips,
)

__all__ = [
    "ColumnSpec",
    "Crosswalk",
    "DatasetDescriptor",
    "FeatureInfo",
    "KeySpec",
    "MasterTable",
    "RawTable",
    "aggregate_by_crosswalk",
    "drop_sparse_columns",
    "filter_sparse_rows",
    "impute_median",
    "join_on_fips",
    "load_crosswalk",
    "load_descriptors",
    "load_table",
    "point_cell_key",
]
