"""Three-phase query execution: index lookup, refinement, scan.

Refinement locates the scan start inside each partition's lon-sorted run,
either by binary search or by the partition's rank model plus a bounded
corrective walk.  Both techniques and the scan itself are deliberately plain
Python loops so their measured difference reflects the search technique and
nothing else; do not replace one side with a C-accelerated helper.

The learned walk mirrors the model's two miss directions: an estimate below
the range walks forward to the first in-range lon (nothing there can match);
an estimate at or past the range start walks backward collecting the matches
it passes, and the scan then proceeds from the estimate.
"""

import enum
from dataclasses import dataclass
from time import perf_counter_ns

from .geometry import RangeQuery
from .partitions import Partition
from .spline import map_key


class SearchMode(str, enum.Enum):
    LEARNED = "learned"
    BINARY = "binary"

    def __str__(self):
        return self.value


@dataclass
class QueryStats:
    """Per-query instrumentation.

    points_scanned counts coordinate reads by walks and scans (model probes
    and binary-search probes are not scans); search_consults counts how many
    partitions invoked a search technique at all.  total_ns is measured
    around the whole query, so it is never less than the phase sum.
    """

    index_ns: int = 0
    refine_ns: int = 0
    scan_ns: int = 0
    total_ns: int = 0
    partitions_intersected: int = 0
    points_scanned: int = 0
    result_count: int = 0
    search_consults: int = 0


def refine(part: Partition, q: RangeQuery, mode: SearchMode, out: list,
           stats: QueryStats, qlo_mapped: int | None = None) -> int:
    """Scan start for this partition; may emit early matches (learned mode).

    In binary mode the return value is exactly the lon lower bound of the
    query start.  In learned mode the return value is >= that lower bound and
    every match below it has already been appended to out.
    """
    qb = q.bounds
    qlo = qb.min_lon
    if qlo <= part.bounds.min_lon:
        # the run starts inside the range: position 0 is the lower bound
        return 0
    lons = part.lons
    n = len(lons)
    stats.search_consults += 1

    if mode is SearchMode.BINARY:
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) >> 1
            if lons[mid] < qlo:
                lo = mid + 1
            else:
                hi = mid
        return lo

    model = part.model
    mk = map_key(qlo) if qlo_mapped is None else qlo_mapped
    min_m = model.min_mapped
    if mk <= min_m:
        est = 0
    elif mk >= model.max_mapped:
        est = model.positions[-1] if mk == model.max_mapped else n - 1
    else:
        table = model.radix_table
        p = (mk - min_m) >> model.shift
        skeys = model.keys
        j = table[p] - 1
        if j < 0:
            j = 0
        hi = table[p + 1] - 1
        last = len(skeys) - 2
        if hi > last:
            hi = last
        if hi - j > 8:
            hb = hi + 1
            while j < hb:
                mid = (j + hb) >> 1
                if skeys[mid + 1] <= qlo:
                    j = mid + 1
                else:
                    hb = mid
        else:
            while j < hi and skeys[j + 1] <= qlo:
                j += 1
        est = int(model.positions[j] + (qlo - skeys[j]) * model.slopes[j] + 0.5)
        if est < 0:
            est = 0
        elif est >= n:
            est = n - 1

    if lons[est] >= qlo:
        # at or past the range start: collect matches behind the estimate
        xhi = qb.max_lon
        ylo = qb.min_lat
        yhi = qb.max_lat
        lats = part.lats
        append = out.append
        j = est - 1
        while j >= 0:
            x = lons[j]
            if x < qlo:
                break
            if x <= xhi:
                y = lats[j]
                if ylo <= y <= yhi:
                    append((x, y))
            j -= 1
        # the estimate itself is re-read by scan, so it is not charged here
        stats.points_scanned += (est - j) if j >= 0 else est
        return est
    i = est + 1
    while i < n and lons[i] < qlo:
        i += 1
    stats.points_scanned += (i - est + 1) if i < n else (i - est)
    return i


def scan(part: Partition, start: int, q: RangeQuery, out: list, stats: QueryStats) -> int:
    """Append matches from start until lon leaves the range; returns how many."""
    qb = q.bounds
    xhi = qb.max_lon
    ylo = qb.min_lat
    yhi = qb.max_lat
    lons = part.lons
    lats = part.lats
    n = len(lons)
    append = out.append
    before = len(out)
    i = start
    while i < n:
        x = lons[i]
        if x > xhi:
            break
        y = lats[i]
        if ylo <= y <= yhi:
            append((x, y))
        i += 1
    stats.points_scanned += (i - start + 1) if i < n else (i - start)
    return len(out) - before


def range_query(index, q: RangeQuery, mode: SearchMode = SearchMode.LEARNED,
                out: list | None = None) -> tuple[list, QueryStats]:
    """Execute one query; returns (result list, stats).

    Pass `out` to reuse a result buffer across queries (the engine appends
    and never clears).  Each phase is timed separately; whole partitions
    inside the query are bulk-copied with no search consult.
    """
    stats = QueryStats()
    if out is None:
        out = []
    base = len(out)
    qb = q.bounds
    t_query = perf_counter_ns()

    t0 = perf_counter_ns()
    parts = index.lookup(q)
    stats.index_ns = perf_counter_ns() - t0
    stats.partitions_intersected = len(parts)

    mk = None
    if mode is SearchMode.LEARNED and parts:
        t0 = perf_counter_ns()
        mk = map_key(qb.min_lon)
        stats.refine_ns += perf_counter_ns() - t0

    q_min_lon = qb.min_lon
    q_min_lat = qb.min_lat
    q_max_lon = qb.max_lon
    q_max_lat = qb.max_lat
    for part in parts:
        b = part.bounds
        if (q_min_lon <= b.min_lon and b.max_lon <= q_max_lon
                and q_min_lat <= b.min_lat and b.max_lat <= q_max_lat):
            t0 = perf_counter_ns()
            out.extend(zip(part.lons, part.lats))
            stats.scan_ns += perf_counter_ns() - t0
            stats.points_scanned += len(part.lons)
            continue
        t0 = perf_counter_ns()
        start = refine(part, q, mode, out, stats, mk)
        stats.refine_ns += perf_counter_ns() - t0
        t0 = perf_counter_ns()
        scan(part, start, q, out, stats)
        stats.scan_ns += perf_counter_ns() - t0

    stats.result_count = len(out) - base
    stats.total_ns = perf_counter_ns() - t_query
    return out, stats
