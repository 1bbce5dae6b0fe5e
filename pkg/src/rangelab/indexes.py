"""Index construction dispatch and the tuning ladders."""

from .dataset import Dataset
from .grids import AdaptiveGridIndex, FixedGridIndex
from .spline import DEFAULT_MAX_ERROR
from .trees import KdTreeIndex, QuadtreeIndex, StrTreeIndex

INDEX_KINDS = ("fixed", "adaptive", "kdtree", "quadtree", "str")

DEFAULT_PARAMS = {
    "fixed": 1024,
    "adaptive": 1024,
    "kdtree": 256,
    "quadtree": 512,
    "str": 256,
}

# power-of-two sweep ranges as (lo_exp, hi_exp), inclusive
SWEEP_EXPONENTS = {
    "fixed": (4, 16),
    "adaptive": (4, 16),
    "kdtree": (6, 14),
    "quadtree": (2, 12),
    "str": (2, 12),
}


def ladder(kind: str, lo: int | None = None, hi: int | None = None) -> list[int]:
    """Power-of-two candidate params for a kind, clipped to [lo, hi]."""
    e0, e1 = SWEEP_EXPONENTS[kind]
    values = [1 << e for e in range(e0, e1 + 1)]
    if lo is not None:
        values = [v for v in values if v >= lo]
    if hi is not None:
        values = [v for v in values if v <= hi]
    if not values:
        raise ValueError(f"sweep range [{lo}, {hi}] leaves no candidates for {kind}")
    return values


def build_index(ds: Dataset, kind: str, param: int | None = None,
                max_error: int = DEFAULT_MAX_ERROR, radix_bits: int | None = None,
                max_depth: int = QuadtreeIndex.MAX_DEPTH):
    """Build one of the five index structures over a dataset."""
    if kind not in INDEX_KINDS:
        raise ValueError(f"unknown index kind {kind!r}")
    if param is None:
        param = DEFAULT_PARAMS[kind]
    if kind == "fixed":
        return FixedGridIndex(ds, param, max_error, radix_bits)
    if kind == "adaptive":
        return AdaptiveGridIndex(ds, param, max_error, radix_bits)
    if kind == "kdtree":
        return KdTreeIndex(ds, param, max_error, radix_bits)
    if kind == "quadtree":
        return QuadtreeIndex(ds, param, max_error, radix_bits, max_depth)
    return StrTreeIndex(ds, param, max_error, radix_bits)
