"""Latitude-strip grid indexes: fixed-width and equi-depth.

Both slice the data into horizontal strips spanning the full lon extent.
The fixed grid locates strips by offset arithmetic on an equal width; the
adaptive grid stores the observed lat quantiles and binary-searches them.
"""

import numpy as np

from .dataset import Dataset
from .geometry import BoundingBox, RangeQuery
from .partitions import Partition
from .searching import lower_bound, upper_bound
from .spline import DEFAULT_MAX_ERROR


def _group_rows(values: np.ndarray, idx: np.ndarray, cells: int):
    """Row indices of each cell, preserving input order inside a cell."""
    order = np.argsort(idx, kind="stable")
    starts = np.searchsorted(idx[order], np.arange(cells + 1))
    return order, starts


class FixedGridIndex:
    """Equal-width lat strips; strip lookup is O(1) arithmetic."""

    kind = "fixed"

    def __init__(self, ds: Dataset, cells: int,
                 max_error: int = DEFAULT_MAX_ERROR, radix_bits: int | None = None):
        if cells < 1:
            raise ValueError("cells must be >= 1")
        b = ds.bounds
        if b.height == 0.0:
            cells = 1
        self.param = cells
        self.bounds = b
        w = b.height / cells
        self.width = w
        edges = b.min_lat + w * np.arange(cells + 1)
        edges[0], edges[-1] = b.min_lat, b.max_lat
        self.edges = edges.tolist()

        if cells == 1:
            idx = np.zeros(ds.n, dtype=np.int64)
        else:
            idx = np.clip(((ds.lats - b.min_lat) / w).astype(np.int64), 0, cells - 1)
            # arithmetic can land one strip off exactly at an edge; repair so
            # membership agrees with the stored edge values
            idx = np.where(ds.lats < edges[idx], idx - 1, idx)
            idx = np.where((ds.lats >= edges[idx + 1]) & (idx < cells - 1), idx + 1, idx)

        order, starts = _group_rows(ds.lats, idx, cells)
        self.strips: list[Partition | None] = [None] * cells
        for i in range(cells):
            rows = order[starts[i]:starts[i + 1]]
            if len(rows) == 0:
                continue
            cell_box = BoundingBox(b.min_lon, self.edges[i], b.max_lon, self.edges[i + 1])
            self.strips[i] = Partition(ds.lons[rows], ds.lats[rows], cell_box,
                                       max_error, radix_bits)
        self.partitions = [p for p in self.strips if p is not None]

    @property
    def partition_count(self) -> int:
        return len(self.partitions)

    def lookup(self, q: RangeQuery) -> list[Partition]:
        """Non-empty strips whose rectangle intersects the query."""
        qb = q.bounds
        b = self.bounds
        if qb.max_lon < b.min_lon or qb.min_lon > b.max_lon:
            return []
        edges = self.edges
        c = len(self.strips)
        if qb.max_lat < edges[0] or qb.min_lat > edges[c]:
            return []
        if c == 1:
            p = self.strips[0]
            return [p] if p is not None else []
        w = self.width
        i0 = int((qb.min_lat - edges[0]) / w)
        if i0 < 0:
            i0 = 0
        elif i0 > c - 1:
            i0 = c - 1
        while i0 > 0 and edges[i0] >= qb.min_lat:
            i0 -= 1
        while i0 < c - 1 and edges[i0 + 1] < qb.min_lat:
            i0 += 1
        i1 = int((qb.max_lat - edges[0]) / w)
        if i1 < 0:
            i1 = 0
        elif i1 > c - 1:
            i1 = c - 1
        while i1 < c - 1 and edges[i1 + 1] <= qb.max_lat:
            i1 += 1
        while i1 > 0 and edges[i1] > qb.max_lat:
            i1 -= 1
        strips = self.strips
        return [p for i in range(i0, i1 + 1) if (p := strips[i]) is not None]

    def size_bytes(self) -> int:
        pts = sum(p.size_bytes() for p in self.partitions)
        return pts + 8 * (len(self.edges) + len(self.strips)) + 48


class AdaptiveGridIndex:
    """Equi-depth lat strips; boundaries are data quantiles."""

    kind = "adaptive"

    def __init__(self, ds: Dataset, cells: int,
                 max_error: int = DEFAULT_MAX_ERROR, radix_bits: int | None = None):
        if cells < 1:
            raise ValueError("cells must be >= 1")
        b = ds.bounds
        self.param = cells
        self.bounds = b
        n = ds.n
        lat_sorted = np.sort(ds.lats)
        cuts = [lat_sorted[(j * n) // cells] for j in range(1, cells)]
        scales = np.unique(np.array([b.min_lat, *cuts, b.max_lat]))
        self.scales = scales.tolist()
        m = len(self.scales) - 1

        if m == 1:
            idx = np.zeros(n, dtype=np.int64)
        else:
            idx = np.clip(np.searchsorted(scales, ds.lats, side="right") - 1, 0, m - 1)

        order, starts = _group_rows(ds.lats, idx, m)
        self.strips: list[Partition | None] = [None] * m
        for i in range(m):
            rows = order[starts[i]:starts[i + 1]]
            if len(rows) == 0:
                continue
            cell_box = BoundingBox(b.min_lon, self.scales[i], b.max_lon, self.scales[i + 1])
            self.strips[i] = Partition(ds.lons[rows], ds.lats[rows], cell_box,
                                       max_error, radix_bits)
        self.partitions = [p for p in self.strips if p is not None]

    @property
    def partition_count(self) -> int:
        return len(self.partitions)

    def lookup(self, q: RangeQuery) -> list[Partition]:
        """Non-empty strips whose rectangle intersects the query."""
        qb = q.bounds
        b = self.bounds
        if qb.max_lon < b.min_lon or qb.min_lon > b.max_lon:
            return []
        scales = self.scales
        m = len(self.strips)
        if qb.max_lat < scales[0] or qb.min_lat > scales[m]:
            return []
        i0 = lower_bound(scales, qb.min_lat) - 1
        if i0 < 0:
            i0 = 0
        i1 = upper_bound(scales, qb.max_lat) - 1
        if i1 > m - 1:
            i1 = m - 1
        strips = self.strips
        return [p for i in range(i0, i1 + 1) if (p := strips[i]) is not None]

    def size_bytes(self) -> int:
        pts = sum(p.size_bytes() for p in self.partitions)
        return pts + 8 * (len(self.scales) + len(self.strips)) + 48
