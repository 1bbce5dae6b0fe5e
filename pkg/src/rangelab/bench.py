"""Measurement harness: timed runs, parameter sweeps, build statistics.

All timing comes from the engine's per-query stats; the harness only
aggregates.  Result counts are folded into an order-sensitive checksum so
runs that must agree (the same workload under different search modes or
indexes) can be compared byte-for-byte.
"""

import statistics
import time
from dataclasses import dataclass, field

from .dataset import Dataset
from .engine import SearchMode, range_query
from .errors import ChecksumMismatchError
from .indexes import DEFAULT_PARAMS, build_index, ladder
from .workload import Workload

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

AGGREGATE_HEADER = ("index,mode,param,selectivity,kind,mean_ns,median_ns,p99_ns,"
                    "index_ns,refine_ns,scan_ns,partitions_mean,scanned_mean,"
                    "result_checksum")
PER_QUERY_HEADER = ("index,mode,param,rep,query,total_ns,index_ns,refine_ns,"
                    "scan_ns,partitions,scanned,count")
TUNE_HEADER = "index,mode,param,mean_ns,partitions_mean,scanned_mean,argmin"
BUILD_STATS_HEADER = "index,param,build_ns,size_bytes,partitions"


def fnv1a64(counts) -> int:
    """FNV-1a over the counts rendered as 8-byte little-endian blocks."""
    h = _FNV_OFFSET
    for c in counts:
        for b in c.to_bytes(8, "little"):
            h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def percentile_99(sorted_samples) -> float:
    """Nearest-rank 99th percentile of an ascending sample list."""
    m = len(sorted_samples)
    rank = -(-99 * m // 100)  # ceil(0.99*m)
    return float(sorted_samples[rank - 1])


@dataclass
class AggregateRow:
    index: str
    mode: str
    param: int
    selectivity: float
    kind: str
    mean_ns: float
    median_ns: float
    p99_ns: float
    index_ns: float
    refine_ns: float
    scan_ns: float
    partitions_mean: float
    scanned_mean: float
    result_checksum: str
    rep_means: tuple = ()  # per-rep mean total_ns, for median-of-runs readings

    def csv(self) -> str:
        return (f"{self.index},{self.mode},{self.param},{self.selectivity!r},"
                f"{self.kind},{self.mean_ns:.1f},{self.median_ns:.1f},"
                f"{self.p99_ns:.1f},{self.index_ns:.1f},{self.refine_ns:.1f},"
                f"{self.scan_ns:.1f},{self.partitions_mean:.3f},"
                f"{self.scanned_mean:.3f},{self.result_checksum}")


@dataclass
class PerQueryRow:
    index: str
    mode: str
    param: int
    rep: int
    query: int
    total_ns: int
    index_ns: int
    refine_ns: int
    scan_ns: int
    partitions: int
    scanned: int
    count: int

    def csv(self) -> str:
        return (f"{self.index},{self.mode},{self.param},{self.rep},{self.query},"
                f"{self.total_ns},{self.index_ns},{self.refine_ns},{self.scan_ns},"
                f"{self.partitions},{self.scanned},{self.count}")


def run_workload(index, workload: Workload, mode: SearchMode, reps: int = 3,
                 warmup: int = 1, keep_per_query: bool = False):
    """Measure every workload query reps times; returns (row, per-query rows).

    Warmup passes run the identical loop but contribute no samples.  Result
    counts must repeat exactly across reps; a mismatch means the engine or
    index is nondeterministic and aborts the run.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    queries = workload.queries
    mode = SearchMode(mode)
    buf: list = []
    for _ in range(warmup):
        for q in queries:
            buf.clear()
            range_query(index, q, mode, buf)

    totals: list[int] = []
    rep_means: list[float] = []
    sum_index = sum_refine = sum_scan = 0
    sum_parts = sum_scanned = 0
    counts0: list[int] | None = None
    pq_rows: list[PerQueryRow] = []
    for rep in range(reps):
        counts: list[int] = []
        rep_total = 0
        for qi, q in enumerate(queries):
            buf.clear()
            _, st = range_query(index, q, mode, buf)
            totals.append(st.total_ns)
            rep_total += st.total_ns
            sum_index += st.index_ns
            sum_refine += st.refine_ns
            sum_scan += st.scan_ns
            sum_parts += st.partitions_intersected
            sum_scanned += st.points_scanned
            counts.append(st.result_count)
            if keep_per_query:
                pq_rows.append(PerQueryRow(index.kind, mode.value, index.param,
                                           rep, qi, st.total_ns, st.index_ns,
                                           st.refine_ns, st.scan_ns,
                                           st.partitions_intersected,
                                           st.points_scanned, st.result_count))
        rep_means.append(rep_total / len(queries))
        if counts0 is None:
            counts0 = counts
        elif counts != counts0:
            raise ChecksumMismatchError(
                f"{index.kind}/{mode.value}: result counts changed between reps")
    m = len(totals)
    totals.sort()
    row = AggregateRow(
        index=index.kind, mode=mode.value, param=index.param,
        selectivity=workload.spec.selectivity, kind=workload.spec.kind,
        mean_ns=sum(totals) / m,
        median_ns=float(statistics.median(totals)),
        p99_ns=percentile_99(totals),
        index_ns=sum_index / m, refine_ns=sum_refine / m, scan_ns=sum_scan / m,
        partitions_mean=sum_parts / m, scanned_mean=sum_scanned / m,
        result_checksum=f"{fnv1a64(counts0):016x}",
        rep_means=tuple(rep_means),
    )
    return row, pq_rows


def verify_checksums(rows: list[AggregateRow]) -> None:
    """All rows of one workload must agree on the result checksum."""
    if not rows:
        return
    seen = {r.result_checksum for r in rows}
    if len(seen) > 1:
        detail = "; ".join(f"{r.index}/{r.mode}/{r.param}={r.result_checksum}"
                           for r in rows)
        raise ChecksumMismatchError(f"result checksums diverge: {detail}")


def run_suite(ds: Dataset, workload: Workload, index_specs, modes,
              reps: int = 3, warmup: int = 1, max_error: int = 32,
              keep_per_query: bool = False):
    """Run every (index, mode) pair over one workload and cross-check results.

    index_specs is a list of (kind, param-or-None).  Returns (aggregate rows,
    per-query rows); raises ChecksumMismatchError when any pair disagrees on
    what the workload returned.
    """
    rows: list[AggregateRow] = []
    pq: list[PerQueryRow] = []
    for kind, param in index_specs:
        index = build_index(ds, kind, param, max_error)
        for mode in modes:
            row, rows_pq = run_workload(index, workload, SearchMode(mode),
                                        reps, warmup, keep_per_query)
            rows.append(row)
            pq.extend(rows_pq)
        del index
    verify_checksums(rows)
    return rows, pq


@dataclass
class TuneRow:
    param: int
    mean_ns: float
    partitions_mean: float
    scanned_mean: float
    rep_means: tuple = ()
    best: bool = False


@dataclass
class TuneResult:
    kind: str
    mode: str
    rows: list[TuneRow] = field(default_factory=list)
    best_param: int = 0

    def csv(self) -> str:
        lines = [TUNE_HEADER]
        lines.extend(f"{self.kind},{self.mode},{r.param},{r.mean_ns:.1f},"
                     f"{r.partitions_mean:.3f},{r.scanned_mean:.3f},"
                     f"{int(r.best)}" for r in self.rows)
        lines.append("")
        return "\n".join(lines)


def pick_best(params, means, avg_partition_sizes) -> int:
    """Index of the winning candidate: lowest mean, ties to coarser layout."""
    best = 0
    for i in range(1, len(params)):
        if means[i] < means[best] or (means[i] == means[best]
                                      and avg_partition_sizes[i] > avg_partition_sizes[best]):
            best = i
    return best


def tune(ds: Dataset, workload: Workload, kind: str,
         mode: SearchMode = SearchMode.BINARY, lo: int | None = None,
         hi: int | None = None, reps: int = 3, warmup: int = 1,
         max_error: int = 32) -> TuneResult:
    """Sweep the kind's power-of-two ladder and pick the fastest param."""
    params = ladder(kind, lo, hi)
    mode = SearchMode(mode)
    result = TuneResult(kind, mode.value)
    sizes: list[float] = []
    means: list[float] = []
    for p in params:
        index = build_index(ds, kind, p, max_error)
        row, _ = run_workload(index, workload, mode, reps, warmup)
        result.rows.append(TuneRow(p, row.mean_ns, row.partitions_mean,
                                   row.scanned_mean, row.rep_means))
        sizes.append(ds.n / index.partition_count)
        means.append(row.mean_ns)
        del index
    best = pick_best(params, means, sizes)
    result.rows[best].best = True
    result.best_param = params[best]
    return result


@dataclass
class BuildStatsRow:
    index: str
    param: int
    build_ns: int
    size_bytes: int
    partitions: int

    def csv(self) -> str:
        return (f"{self.index},{self.param},{self.build_ns},"
                f"{self.size_bytes},{self.partitions}")


def build_stats(ds: Dataset, index_specs, reps: int = 3,
                max_error: int = 32) -> list[BuildStatsRow]:
    """Median wall-clock build time and analytic size for each index spec."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    rows = []
    for kind, param in index_specs:
        if param is None:
            param = DEFAULT_PARAMS[kind]
        times = []
        index = None
        for _ in range(reps):
            t0 = time.perf_counter_ns()
            index = build_index(ds, kind, param, max_error)
            times.append(time.perf_counter_ns() - t0)
        rows.append(BuildStatsRow(kind, param, statistics.median_low(times),
                                  index.size_bytes(), index.partition_count))
        del index
    return rows


def render_aggregate_csv(rows: list[AggregateRow]) -> str:
    lines = [AGGREGATE_HEADER]
    lines.extend(r.csv() for r in rows)
    lines.append("")
    return "\n".join(lines)


def render_per_query_csv(rows: list[PerQueryRow]) -> str:
    lines = [PER_QUERY_HEADER]
    lines.extend(r.csv() for r in rows)
    lines.append("")
    return "\n".join(lines)


def render_build_stats_csv(rows: list[BuildStatsRow]) -> str:
    lines = [BUILD_STATS_HEADER]
    lines.extend(r.csv() for r in rows)
    lines.append("")
    return "\n".join(lines)
