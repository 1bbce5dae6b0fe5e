"""Exact rectangle counting over a fixed point set.

A bucket grid with 2-D prefix sums answers the fully-covered interior in
O(1); the at-most-two partial columns and rows on each side are resolved by
slicing per-bucket sorted copies.  Bucket membership is repaired to agree
exactly with the stored boundary arrays, so counts are exact, not
approximate, even when a query edge coincides with a bucket edge.
"""

import numpy as np

from .geometry import BoundingBox, RangeQuery


def _bucketize(vals: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Bucket index per value: half-open [e_i, e_i+1), last bucket closed."""
    nb = len(edges) - 1
    if nb == 1:
        return np.zeros(len(vals), dtype=np.int64)
    w = (edges[-1] - edges[0]) / nb
    ix = np.clip(((vals - edges[0]) / w).astype(np.int64), 0, nb - 1)
    # float division can land one bucket off near an edge; repair both ways
    ix = np.where(vals < edges[ix], ix - 1, ix)
    ix = np.where((vals >= edges[ix + 1]) & (ix < nb - 1), ix + 1, ix)
    return ix


class CountingGrid:
    """Counts points inside closed rectangles, exactly."""

    def __init__(self, lons: np.ndarray, lats: np.ndarray, bounds: BoundingBox,
                 buckets: int | None = None):
        n = len(lons)
        if buckets is None:
            buckets = max(1, min(256, int(np.sqrt(max(n, 1)) / 8)))
        gx = buckets if bounds.width > 0 else 1
        gy = buckets if bounds.height > 0 else 1
        self.xe = np.linspace(bounds.min_lon, bounds.max_lon, gx + 1)
        self.ye = np.linspace(bounds.min_lat, bounds.max_lat, gy + 1)
        self.xe[0], self.xe[-1] = bounds.min_lon, bounds.max_lon
        self.ye[0], self.ye[-1] = bounds.min_lat, bounds.max_lat
        self.gx, self.gy = gx, gy

        ix = _bucketize(lons, self.xe)
        iy = _bucketize(lats, self.ye)

        cell = np.bincount(ix * gy + iy, minlength=gx * gy).reshape(gx, gy)
        self.prefix = np.zeros((gx + 1, gy + 1), dtype=np.int64)
        self.prefix[1:, 1:] = cell.cumsum(axis=0).cumsum(axis=1)

        # per-column copies sorted by lat, for partial-column edges
        order = np.lexsort((lats, ix))
        self.col_starts = np.searchsorted(ix[order], np.arange(gx + 1))
        self.col_lat = lats[order]
        self.col_lon = lons[order]
        # per-row copies sorted by lon, for partial-row edges
        order = np.lexsort((lons, iy))
        self.row_starts = np.searchsorted(iy[order], np.arange(gy + 1))
        self.row_lon = lons[order]
        self.row_lat = lats[order]

    def _col_count(self, c: int, qb: BoundingBox) -> int:
        s, e = self.col_starts[c], self.col_starts[c + 1]
        lo = s + np.searchsorted(self.col_lat[s:e], qb.min_lat, side="left")
        hi = s + np.searchsorted(self.col_lat[s:e], qb.max_lat, side="right")
        seg = self.col_lon[lo:hi]
        return int(np.count_nonzero((seg >= qb.min_lon) & (seg <= qb.max_lon)))

    def _row_count(self, r: int, qb: BoundingBox, x_lo: float, x_hi_idx: int) -> int:
        # counts row r restricted to the fully-covered column band; the band
        # is half-open on the right except when it ends at the domain edge
        s, e = self.row_starts[r], self.row_starts[r + 1]
        lo = s + np.searchsorted(self.row_lon[s:e], x_lo, side="left")
        if x_hi_idx >= self.gx:
            hi = s + np.searchsorted(self.row_lon[s:e], self.xe[self.gx], side="right")
        else:
            hi = s + np.searchsorted(self.row_lon[s:e], self.xe[x_hi_idx], side="left")
        seg = self.row_lat[lo:hi]
        return int(np.count_nonzero((seg >= qb.min_lat) & (seg <= qb.max_lat)))

    def count(self, q: RangeQuery) -> int:
        qb = q.bounds
        xe, ye, gx, gy = self.xe, self.ye, self.gx, self.gy
        if qb.max_lon < xe[0] or qb.min_lon > xe[gx] or qb.max_lat < ye[0] or qb.min_lat > ye[gy]:
            return 0
        # touched and fully-covered bucket ranges on each axis
        i0 = max(0, int(np.searchsorted(xe, qb.min_lon, side="right")) - 1)
        i1 = min(gx - 1, int(np.searchsorted(xe, qb.max_lon, side="right")) - 1)
        j0 = max(0, int(np.searchsorted(ye, qb.min_lat, side="right")) - 1)
        j1 = min(gy - 1, int(np.searchsorted(ye, qb.max_lat, side="right")) - 1)
        fi0 = int(np.searchsorted(xe, qb.min_lon, side="left"))
        fi1 = int(np.searchsorted(xe, qb.max_lon, side="right")) - 2
        fj0 = int(np.searchsorted(ye, qb.min_lat, side="left"))
        fj1 = int(np.searchsorted(ye, qb.max_lat, side="right")) - 2

        total = 0
        have_cols = fi0 <= fi1
        have_rows = fj0 <= fj1
        if have_cols and have_rows:
            p = self.prefix
            total += int(p[fi1 + 1, fj1 + 1] - p[fi0, fj1 + 1]
                         - p[fi1 + 1, fj0] + p[fi0, fj0])
        # partial columns take the query's full lat extent; partial rows are
        # then restricted to the fully-covered column band to avoid overlap
        for c in range(i0, min(fi0, i1 + 1)):
            total += self._col_count(c, qb)
        for c in range(max(fi1 + 1, fi0, i0), i1 + 1):
            total += self._col_count(c, qb)
        if have_cols:
            for r in range(j0, min(fj0, j1 + 1)):
                total += self._row_count(r, qb, xe[fi0], fi1 + 1)
            for r in range(max(fj1 + 1, fj0, j0), j1 + 1):
                total += self._row_count(r, qb, xe[fi0], fi1 + 1)
        return total


def brute_count(lons: np.ndarray, lats: np.ndarray, q: RangeQuery) -> int:
    """Reference count by full predicate evaluation."""
    qb = q.bounds
    return int(np.count_nonzero((lons >= qb.min_lon) & (lons <= qb.max_lon)
                                & (lats >= qb.min_lat) & (lats <= qb.max_lat)))


def brute_filter(lons: np.ndarray, lats: np.ndarray, q: RangeQuery):
    """Reference result set by full predicate evaluation."""
    qb = q.bounds
    m = ((lons >= qb.min_lon) & (lons <= qb.max_lon)
         & (lats >= qb.min_lat) & (lats <= qb.max_lat))
    return lons[m], lats[m]
