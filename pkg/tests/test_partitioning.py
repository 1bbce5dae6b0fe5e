"""Structural invariants of the five partitioning schemes."""

import math
from collections import Counter

import numpy as np
import pytest

from rangelab import Partition, build_index
from rangelab.geometry import BoundingBox, RangeQuery, intersects
from rangelab.indexes import DEFAULT_PARAMS, INDEX_KINDS, SWEEP_EXPONENTS, ladder
from rangelab.rng import SplitMix64
from rangelab.trees import QuadtreeIndex


def all_points(ds):
    return Counter(zip(ds.lons.tolist(), ds.lats.tolist()))


def covered_points(index):
    got = Counter()
    for part in index.partitions:
        got.update(zip(part.lons, part.lats))
    return got


def make_index(kind, ds, param):
    return build_index(ds, kind, param)


def random_queries(ds, seed, count):
    rng = SplitMix64(seed)
    b = ds.bounds
    out = []
    for _ in range(count):
        x0 = b.min_lon + rng.next_float() * b.width
        y0 = b.min_lat + rng.next_float() * b.height
        out.append(RangeQuery(BoundingBox(
            x0, y0,
            min(x0 + rng.next_float() * b.width * 0.2, b.max_lon),
            min(y0 + rng.next_float() * b.height * 0.2, b.max_lat))))
    return out


# --- partition basics ---

def test_partition_sorts_by_lon_stably():
    lons = np.array([3.0, 1.0, 3.0, 0.5, 1.0, 3.0, 2.0, 0.5])
    lats = np.arange(8.0)
    part = Partition(lons, lats)
    assert part.lons == sorted(lons.tolist())
    # ties keep input order: the lat column doubles as the original index
    by_lon = {}
    for x, y in zip(part.lons, part.lats):
        by_lon.setdefault(x, []).append(y)
    for ys in by_lon.values():
        assert ys == sorted(ys)


def test_partition_bounds_tight_or_given():
    lons = np.array([2.0, 5.0, 3.0])
    lats = np.array([1.0, 4.0, 0.0])
    assert Partition(lons, lats).bounds == BoundingBox(2.0, 0.0, 5.0, 4.0)
    cell = BoundingBox(0.0, 0.0, 10.0, 10.0)
    assert Partition(lons, lats, cell).bounds == cell


def test_partition_model_error_bound(small_clustered):
    ds = small_clustered
    part = Partition(ds.lons, ds.lats)
    assert part.bounds == ds.bounds
    from rangelab.searching import lower_bound
    model = part.model
    for k in part.lons[:: max(1, len(part.lons) // 500)]:
        assert abs(model.estimate(k) - lower_bound(part.lons, k)) <= 32


def test_partition_size_floor(small_clustered):
    part = Partition(small_clustered.lons, small_clustered.lats)
    assert part.size_bytes() >= 16 * part.n


# --- fixed grid ---

def test_fixed_grid_multiset_coverage(small_clustered):
    idx = make_index("fixed", small_clustered, 64)
    assert covered_points(idx) == all_points(small_clustered)


def test_fixed_grid_strips_are_lat_disjoint(small_clustered):
    idx = make_index("fixed", small_clustered, 64)
    b = small_clustered.bounds
    step = b.height / 64
    for i, part in enumerate(idx.strips):
        if part is None:
            continue
        lats = np.array(part.lats)
        lo = b.min_lat + i * step
        hi = b.min_lat + (i + 1) * step
        # strip membership follows the cell edges up to boundary assignment
        assert lats.min() >= lo - 1e-9
        if i < 63:
            assert lats.max() <= hi + 1e-9


def test_fixed_grid_lookup_matches_intersection(small_clustered):
    idx = make_index("fixed", small_clustered, 32)
    for q in random_queries(small_clustered, 6, 200):
        got = {id(p) for p in idx.lookup(q)}
        want = {id(p) for p in idx.partitions if intersects(q, p.bounds)}
        assert got == want


def test_fixed_grid_boundary_query_exact_on_edge(small_clustered):
    idx = make_index("fixed", small_clustered, 16)
    b = small_clustered.bounds
    step = b.height / 16
    for i in (0, 5, 15, 16):
        edge = b.min_lat + i * step
        q = RangeQuery(BoundingBox(b.min_lon, edge, b.max_lon, edge))
        got = {id(p) for p in idx.lookup(q)}
        want = {id(p) for p in idx.partitions if intersects(q, p.bounds)}
        assert got == want


def test_fixed_grid_single_cell():
    lons = [1.0, 2.0, 3.0]
    lats = [1.0, 1.0, 1.0]
    from rangelab.dataset import Dataset
    ds = Dataset(np.array(lons), np.array(lats))
    idx = make_index("fixed", ds, 4)
    # zero-height dataset collapses to one strip
    assert idx.partition_count == 1


# --- adaptive grid ---

def test_adaptive_grid_equi_depth(small_clustered):
    idx = make_index("adaptive", small_clustered, 50)
    assert covered_points(idx) == all_points(small_clustered)
    sizes = [p.n for p in idx.partitions]
    lo = min(sizes)
    hi = max(sizes)
    # quantile cuts over distinct values keep strip sizes near n/cells
    assert hi <= math.ceil(small_clustered.n / 50) * 2
    assert lo >= 1


def test_adaptive_grid_deduplicates_cuts():
    from rangelab.dataset import Dataset
    lats = np.repeat([0.0, 1.0, 2.0], 100)
    lons = np.arange(300.0)
    ds = Dataset(lons, lats)
    idx = make_index("adaptive", ds, 64)
    # only three distinct lats exist, so at most three strips survive
    assert idx.partition_count <= 3
    assert covered_points(idx) == all_points(ds)


def test_adaptive_grid_lookup_matches_intersection(small_clustered):
    idx = make_index("adaptive", small_clustered, 40)
    for q in random_queries(small_clustered, 7, 200):
        got = {id(p) for p in idx.lookup(q)}
        want = {id(p) for p in idx.partitions if intersects(q, p.bounds)}
        assert got == want


# --- k-d tree ---

def kd_subtree_size(node, leaves):
    if node.left is None and node.right is None:
        assert node.partition is not None
        leaves.append(node.partition)
        return node.partition.n
    assert node.partition is None
    ln = kd_subtree_size(node.left, leaves)
    rn = kd_subtree_size(node.right, leaves)
    # sibling sizes differ by at most one point
    assert abs(ln - rn) <= 1
    return ln + rn


def test_kdtree_balance_and_coverage(small_clustered):
    idx = make_index("kdtree", small_clustered, 100)
    assert covered_points(idx) == all_points(small_clustered)
    leaves = []
    total = kd_subtree_size(idx.root, leaves)
    assert total == small_clustered.n
    assert len(leaves) == idx.partition_count
    for part in leaves:
        assert part.n <= 100


def test_kdtree_alternates_split_dims(small_clustered):
    idx = make_index("kdtree", small_clustered, 64)

    def walk(node, depth):
        if node.left is None:
            return
        assert node.dim == depth % 2
        walk(node.left, depth + 1)
        walk(node.right, depth + 1)

    walk(idx.root, 0)


def test_kdtree_identical_points_single_leaf():
    from rangelab.dataset import Dataset
    ds = Dataset(np.full(500, 3.0), np.full(500, 4.0))
    idx = make_index("kdtree", ds, 16)
    # nothing to split on: a degenerate column stays one leaf
    assert idx.partition_count == 1
    assert idx.partitions[0].n == 500


def test_kdtree_lookup_matches_intersection(small_clustered):
    idx = make_index("kdtree", small_clustered, 128)
    for q in random_queries(small_clustered, 8, 200):
        got = Counter(id(p) for p in idx.lookup(q))
        want = Counter(id(p) for p in idx.partitions if intersects(q, p.bounds))
        assert got == want


# --- quadtree ---

def test_quadtree_coverage_and_leaf_caps(small_clustered):
    idx = make_index("quadtree", small_clustered, 256)
    assert covered_points(idx) == all_points(small_clustered)

    def walk(node, depth):
        if node.children is None:
            if node.partition is not None and depth < idx.max_depth:
                assert node.partition.n <= 256
            return
        for child in node.children:
            walk(child, depth + 1)

    walk(idx.root, 0)


def test_quadtree_quadrants_tile_exactly():
    from rangelab.dataset import Dataset
    rng = SplitMix64(12)
    lons = np.array([rng.next_float() * 100.0 for _ in range(2000)])
    lats = np.array([rng.next_float() * 100.0 for _ in range(2000)])
    ds = Dataset(lons, lats)
    idx = make_index("quadtree", ds, 100)

    def subtree_points(node):
        pts = []
        stack = [node]
        while stack:
            nd = stack.pop()
            if nd.children is not None:
                stack.extend(nd.children)
            elif nd.partition is not None:
                pts.extend(zip(nd.partition.lons, nd.partition.lats))
        return pts

    def walk(node):
        if node.children is None:
            return
        # split on the cell midlines, west/south strictly below them
        c = node.cell
        mx = 0.5 * (c.min_lon + c.max_lon)
        my = 0.5 * (c.min_lat + c.max_lat)
        names = ("sw", "se", "nw", "ne")
        for child, name in zip(node.children, names):
            for x, y in subtree_points(child):
                west = x < mx
                south = y < my
                assert {"sw": west and south, "se": not west and south,
                        "nw": west and not south,
                        "ne": not west and not south}[name]
            walk(child)

    walk(idx.root)


def test_quadtree_identical_points_stop_at_depth_cap():
    from rangelab.dataset import Dataset
    ds = Dataset(np.full(1000, 1.0), np.full(1000, 2.0))
    idx = QuadtreeIndex(ds, 4, max_depth=16)
    # unsplittable points ride down to the cap and stop there as one leaf
    assert idx.partition_count == 1
    assert idx.partitions[0].n == 1000


def test_quadtree_lookup_skips_empty(small_clustered):
    idx = make_index("quadtree", small_clustered, 128)
    for q in random_queries(small_clustered, 9, 100):
        parts = idx.lookup(q)
        assert all(p.n > 0 for p in parts)
        got = {id(p) for p in parts}
        want = {id(p) for p in idx.partitions if intersects(q, p.bounds)}
        assert got == want


# --- STR ---

def test_str_leaf_fill(small_clustered):
    cap = 64
    idx = make_index("str", small_clustered, cap)
    assert covered_points(idx) == all_points(small_clustered)
    leaves = idx.partitions
    expect = math.ceil(small_clustered.n / cap)
    assert len(leaves) == expect
    sizes = [p.n for p in leaves]
    # every leaf holds exactly cap points except possibly one remainder
    assert sizes.count(cap) >= len(sizes) - 1
    assert sum(sizes) == small_clustered.n
    short = [s for s in sizes if s != cap]
    if short:
        assert short == [small_clustered.n - cap * (expect - 1)]


def test_str_slice_count():
    from rangelab.dataset import Dataset
    rng = SplitMix64(14)
    n = 1000
    ds = Dataset(np.array([rng.next_float() for _ in range(n)]),
                 np.array([rng.next_float() for _ in range(n)]))
    cap = 50
    idx = make_index("str", ds, cap)
    pcount = math.ceil(n / cap)
    slices = math.ceil(math.sqrt(pcount))
    xs = sorted(ds.lons.tolist())
    # the first lon slice holds the slices*cap smallest lons
    width = min(n, slices * cap)
    first = idx.partitions[: math.ceil(width / cap)]
    got = sorted(x for p in first for x in p.lons)
    assert len(got) == width
    assert got == xs[:width]


def test_str_lookup_matches_intersection(small_clustered):
    idx = make_index("str", small_clustered, 128)
    for q in random_queries(small_clustered, 10, 200):
        got = Counter(id(p) for p in idx.lookup(q))
        want = Counter(id(p) for p in idx.partitions if intersects(q, p.bounds))
        assert got == want


# --- shared behaviour ---

@pytest.mark.parametrize("kind", INDEX_KINDS)
def test_every_kind_covers_all_points(kind, small_clustered):
    for seed in (3, 4, 5):
        from rangelab.dataset import generate_clusters
        ds = generate_clusters(3000, seed=seed)
        idx = make_index(kind, ds, DEFAULT_PARAMS[kind])
        assert covered_points(idx) == all_points(ds)


@pytest.mark.parametrize("kind", INDEX_KINDS)
def test_size_bytes_floor(kind, small_clustered):
    idx = make_index(kind, small_clustered, DEFAULT_PARAMS[kind])
    assert idx.size_bytes() >= 16 * small_clustered.n


@pytest.mark.parametrize("kind", INDEX_KINDS)
def test_lookup_returns_only_intersecting(kind, small_clustered):
    idx = make_index(kind, small_clustered, DEFAULT_PARAMS[kind])
    for q in random_queries(small_clustered, 11, 50):
        for p in idx.lookup(q):
            assert intersects(q, p.bounds)


def test_ladder_contents():
    assert ladder("fixed") == [2**e for e in range(4, 17)]
    assert ladder("kdtree") == [2**e for e in range(6, 15)]
    assert ladder("quadtree") == [2**e for e in range(2, 13)]
    # clipping keeps only ladder members inside [lo, hi]
    assert ladder("fixed", lo=8, hi=32) == [16, 32]
    with pytest.raises(ValueError):
        ladder("fixed", lo=64, hi=32)
    assert set(SWEEP_EXPONENTS) == set(INDEX_KINDS)


def test_build_index_validation(small_clustered):
    with pytest.raises(ValueError):
        build_index(small_clustered, "rtree")
    with pytest.raises(ValueError):
        build_index(small_clustered, "fixed", 0)
