"""Partitioned spatial range queries with learned or binary in-partition search.

Core flow: build a Dataset, partition it with one of the five index kinds,
and run rectangle queries through the three-phase engine.  The workload
module generates selectivity-calibrated query sets, bench measures them, and
the service/CLI expose the whole pipeline.
"""

from .dataset import Dataset, DatasetSpec, generate_clusters, generate_dataset, generate_uniform_box
from .engine import QueryStats, SearchMode, range_query, refine, scan
from .errors import (ChecksumMismatchError, EmptyInputError, InvalidBoxError,
                     InvalidKeyError, ParseError, RangelabError, UnsortedInputError)
from .geometry import BoundingBox, Point, RangeQuery, box, contains_box, contains_point, intersects
from .indexes import DEFAULT_PARAMS, INDEX_KINDS, build_index, ladder
from .partitions import Partition
from .spline import RadixSplineModel, build_radix_spline, map_key, search_lower_bound
from .workload import (SELECTIVITIES, Workload, WorkloadSpec, count_in_range,
                       generate_skewed, generate_uniform, generate_workload)

__version__ = "0.1.0"

__all__ = [
    "BoundingBox", "ChecksumMismatchError", "Dataset", "DatasetSpec",
    "DEFAULT_PARAMS", "EmptyInputError", "INDEX_KINDS", "InvalidBoxError",
    "InvalidKeyError", "ParseError", "Partition", "Point", "QueryStats",
    "RadixSplineModel", "RangeQuery", "RangelabError", "SELECTIVITIES",
    "SearchMode", "UnsortedInputError", "Workload", "WorkloadSpec", "box",
    "build_index", "build_radix_spline", "contains_box", "contains_point",
    "count_in_range", "generate_clusters", "generate_dataset",
    "generate_skewed", "generate_uniform", "generate_uniform_box",
    "generate_workload", "intersects", "ladder", "map_key", "range_query",
    "refine", "scan", "search_lower_bound",
]
