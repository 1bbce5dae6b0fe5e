"""Tree-shaped partitionings: k-d, quadtree, and packed rectangles.

All three produce leaf Partitions and answer lookup by descending with
rectangle pruning; returned partitions are filtered by the same closed
intersection predicate the oracle uses, so pruning can never change the
answer, only skip work.
"""

import math

import numpy as np

from .dataset import Dataset
from .geometry import BoundingBox, RangeQuery
from .partitions import Partition
from .spline import DEFAULT_MAX_ERROR


def _tight(lons: np.ndarray, lats: np.ndarray) -> BoundingBox:
    return BoundingBox(float(lons.min()), float(lats.min()),
                       float(lons.max()), float(lats.max()))


class KdNode:
    __slots__ = ("bounds", "dim", "value", "left", "right", "partition")

    def __init__(self, bounds, dim=-1, value=0.0, left=None, right=None, partition=None):
        self.bounds = bounds
        self.dim = dim          # 0 = lon, 1 = lat, -1 = leaf
        self.value = value      # lower-median coordinate recorded at the split
        self.left = left
        self.right = right
        self.partition = partition


class KdTreeIndex:
    """Alternating-dimension median splits down to a leaf threshold.

    Splits are by rank on a stable sort, so sibling sizes differ by at most
    one; the lower median always lands in the left child.
    """

    kind = "kdtree"

    def __init__(self, ds: Dataset, leaf_threshold: int,
                 max_error: int = DEFAULT_MAX_ERROR, radix_bits: int | None = None):
        if leaf_threshold < 1:
            raise ValueError("leaf_threshold must be >= 1")
        self.param = leaf_threshold
        self.bounds = ds.bounds
        self.partitions: list[Partition] = []
        self._me = max_error
        self._rb = radix_bits
        self.node_count = 0
        self.root = self._build(ds, np.arange(ds.n), 0, leaf_threshold)
        del self._me, self._rb

    def _build(self, ds: Dataset, ids: np.ndarray, depth: int, threshold: int) -> KdNode:
        self.node_count += 1
        lons = ds.lons[ids]
        lats = ds.lats[ids]
        bounds = _tight(lons, lats)
        degenerate = bounds.min_lon == bounds.max_lon and bounds.min_lat == bounds.max_lat
        if len(ids) <= threshold or degenerate:
            part = Partition(lons, lats, bounds, self._me, self._rb)
            self.partitions.append(part)
            return KdNode(bounds, partition=part)
        dim = depth & 1
        vals = lons if dim == 0 else lats
        order = np.argsort(vals, kind="stable")
        cut = (len(ids) + 1) // 2
        value = float(vals[order[cut - 1]])
        left = self._build(ds, ids[order[:cut]], depth + 1, threshold)
        right = self._build(ds, ids[order[cut:]], depth + 1, threshold)
        return KdNode(bounds, dim, value, left, right)

    @property
    def partition_count(self) -> int:
        return len(self.partitions)

    def lookup(self, q: RangeQuery) -> list[Partition]:
        qb = q.bounds
        out = []
        stack = [self.root]
        pop = stack.pop
        while stack:
            node = pop()
            b = node.bounds
            if (qb.min_lon > b.max_lon or b.min_lon > qb.max_lon
                    or qb.min_lat > b.max_lat or b.min_lat > qb.max_lat):
                continue
            if node.partition is not None:
                out.append(node.partition)
            else:
                stack.append(node.right)
                stack.append(node.left)
        return out

    def size_bytes(self) -> int:
        pts = sum(p.size_bytes() for p in self.partitions)
        return pts + self.node_count * 64


class QuadNode:
    __slots__ = ("cell", "bounds", "children", "partition", "depth")

    def __init__(self, cell, bounds=None, children=None, partition=None, depth=0):
        self.cell = cell        # the quadrant rectangle this node tiles
        self.bounds = bounds    # tight box of contents; None when empty
        self.children = children
        self.partition = partition
        self.depth = depth


class QuadtreeIndex:
    """Four-way quadrant splits of the data bounding box.

    Every internal node has exactly four children tiling its cell (empty ones
    stay as empty leaves).  A leaf holds at most leaf_threshold points unless
    the depth cap stopped the split.
    """

    kind = "quadtree"
    MAX_DEPTH = 32

    def __init__(self, ds: Dataset, leaf_threshold: int,
                 max_error: int = DEFAULT_MAX_ERROR, radix_bits: int | None = None,
                 max_depth: int = MAX_DEPTH):
        if leaf_threshold < 1:
            raise ValueError("leaf_threshold must be >= 1")
        self.param = leaf_threshold
        self.bounds = ds.bounds
        self.max_depth = max_depth
        self.partitions: list[Partition] = []
        self._me = max_error
        self._rb = radix_bits
        self.node_count = 0
        self.root = self._build(ds, np.arange(ds.n), ds.bounds, 0, leaf_threshold)
        del self._me, self._rb

    def _build(self, ds: Dataset, ids: np.ndarray, cell: BoundingBox,
               depth: int, threshold: int) -> QuadNode:
        self.node_count += 1
        if len(ids) == 0:
            return QuadNode(cell, depth=depth)
        lons = ds.lons[ids]
        lats = ds.lats[ids]
        bounds = _tight(lons, lats)
        if len(ids) <= threshold or depth >= self.max_depth:
            part = Partition(lons, lats, bounds, self._me, self._rb)
            self.partitions.append(part)
            return QuadNode(cell, bounds, partition=part, depth=depth)
        mx = (cell.min_lon + cell.max_lon) * 0.5
        my = (cell.min_lat + cell.max_lat) * 0.5
        west = lons < mx
        south = lats < my
        quads = (
            (ids[west & south], BoundingBox(cell.min_lon, cell.min_lat, mx, my)),
            (ids[~west & south], BoundingBox(mx, cell.min_lat, cell.max_lon, my)),
            (ids[west & ~south], BoundingBox(cell.min_lon, my, mx, cell.max_lat)),
            (ids[~west & ~south], BoundingBox(mx, my, cell.max_lon, cell.max_lat)),
        )
        children = [self._build(ds, sub, sub_cell, depth + 1, threshold)
                    for sub, sub_cell in quads]
        return QuadNode(cell, bounds, children, depth=depth)

    @property
    def partition_count(self) -> int:
        return len(self.partitions)

    def lookup(self, q: RangeQuery) -> list[Partition]:
        qb = q.bounds
        out = []
        stack = [self.root]
        pop = stack.pop
        while stack:
            node = pop()
            b = node.bounds
            if b is None:
                continue
            if (qb.min_lon > b.max_lon or b.min_lon > qb.max_lon
                    or qb.min_lat > b.max_lat or b.min_lat > qb.max_lat):
                continue
            if node.partition is not None:
                out.append(node.partition)
            else:
                ch = node.children
                stack.append(ch[3])
                stack.append(ch[2])
                stack.append(ch[1])
                stack.append(ch[0])
        return out

    def size_bytes(self) -> int:
        pts = sum(p.size_bytes() for p in self.partitions)
        return pts + self.node_count * 96


class StrNode:
    __slots__ = ("bounds", "children", "partition")

    def __init__(self, bounds, children=None, partition=None):
        self.bounds = bounds
        self.children = children
        self.partition = partition


class StrTreeIndex:
    """Sort-tile-recursive packing with leaf capacity N.

    Points are sliced into ceil(sqrt(ceil(P/N))) vertical runs by lon, each
    slice cut into runs of N by lat; every leaf except the last is full.
    Upper levels pack the child-box centroids the same way.
    """

    kind = "str"

    def __init__(self, ds: Dataset, capacity: int,
                 max_error: int = DEFAULT_MAX_ERROR, radix_bits: int | None = None):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.param = capacity
        self.bounds = ds.bounds
        self.partitions: list[Partition] = []
        self.node_count = 0
        self.child_refs = 0

        order = np.argsort(ds.lons, kind="stable")
        n = ds.n
        slices = math.ceil(math.sqrt(math.ceil(n / capacity)))
        cap = slices * capacity
        level: list[StrNode] = []
        for s0 in range(0, n, cap):
            sl = order[s0:s0 + cap]
            sl = sl[np.argsort(ds.lats[sl], kind="stable")]
            for r0 in range(0, len(sl), capacity):
                rows = sl[r0:r0 + capacity]
                part = Partition(ds.lons[rows], ds.lats[rows],
                                 max_error=max_error, radix_bits=radix_bits)
                self.partitions.append(part)
                level.append(StrNode(part.bounds, partition=part))
                self.node_count += 1

        while len(level) > 1:
            cx = np.array([(nd.bounds.min_lon + nd.bounds.max_lon) * 0.5 for nd in level])
            cy = np.array([(nd.bounds.min_lat + nd.bounds.max_lat) * 0.5 for nd in level])
            m = len(level)
            slices = math.ceil(math.sqrt(math.ceil(m / capacity)))
            cap = slices * capacity
            order = np.argsort(cx, kind="stable")
            parents: list[StrNode] = []
            for s0 in range(0, m, cap):
                sl = order[s0:s0 + cap]
                sl = sl[np.argsort(cy[sl], kind="stable")]
                for r0 in range(0, len(sl), capacity):
                    grp = [level[i] for i in sl[r0:r0 + capacity]]
                    gb = grp[0].bounds
                    min_lon, min_lat, max_lon, max_lat = gb
                    for nd in grp[1:]:
                        nb = nd.bounds
                        if nb.min_lon < min_lon:
                            min_lon = nb.min_lon
                        if nb.min_lat < min_lat:
                            min_lat = nb.min_lat
                        if nb.max_lon > max_lon:
                            max_lon = nb.max_lon
                        if nb.max_lat > max_lat:
                            max_lat = nb.max_lat
                    parents.append(StrNode(BoundingBox(min_lon, min_lat, max_lon, max_lat), grp))
                    self.node_count += 1
                    self.child_refs += len(grp)
            level = parents
        self.root = level[0]

    @property
    def partition_count(self) -> int:
        return len(self.partitions)

    def lookup(self, q: RangeQuery) -> list[Partition]:
        qb = q.bounds
        out = []
        stack = [self.root]
        pop = stack.pop
        while stack:
            node = pop()
            b = node.bounds
            if (qb.min_lon > b.max_lon or b.min_lon > qb.max_lon
                    or qb.min_lat > b.max_lat or b.min_lat > qb.max_lat):
                continue
            if node.partition is not None:
                out.append(node.partition)
            else:
                stack.extend(reversed(node.children))
        return out

    def size_bytes(self) -> int:
        pts = sum(p.size_bytes() for p in self.partitions)
        return pts + self.node_count * 56 + self.child_refs * 8
