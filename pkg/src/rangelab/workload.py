"""Query workload generation calibrated to a target selectivity.

Each query starts from an anchor (a data record for skewed workloads, a
uniform draw over the data bounding box for uniform ones), picks a
log-uniform aspect ratio in [0.25, 4], and bisects a scale factor for the
rectangle until its exact result count lands inside a tolerance band around
the target.  The emitted rectangle is always clipped to the data bounds;
queries that cannot reach the band within the step budget carry a warning
flag.
"""

import math
from dataclasses import dataclass, field

from .dataset import Dataset
from .errors import ParseError
from .geometry import BoundingBox, RangeQuery
from .rng import SplitMix64

SELECTIVITIES = (1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2)
WORKLOAD_KINDS = ("skewed", "uniform")

_MAX_BISECT = 64


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str
    selectivity: float
    count: int
    seed: int = 0
    tolerance: float = 0.1


@dataclass
class Workload:
    spec: WorkloadSpec
    queries: list[RangeQuery] = field(default_factory=list)
    achieved: list[int] = field(default_factory=list)
    flagged: list[bool] = field(default_factory=list)

    @property
    def flagged_count(self) -> int:
        return sum(self.flagged)


def target_count(selectivity: float, n: int) -> int:
    """Intended result count: round-half-up of selectivity*n, at least 1."""
    if not 0.0 < selectivity <= 1.0:
        raise ValueError(f"selectivity must be in (0, 1], got {selectivity}")
    t = int(selectivity * n + 0.5)
    if t < 1:
        t = 1
    if t > n:
        raise ValueError(f"target {t} exceeds dataset size {n}")
    return t


def tolerance_band(target: int, tolerance: float) -> tuple[int, int]:
    tol = int(tolerance * target + 0.5)
    if tol < 1:
        tol = 1
    lo = target - tol
    return (lo if lo > 1 else 1, target + tol)


def _clipped(ax: float, ay: float, hw: float, hh: float, dom: BoundingBox) -> RangeQuery:
    return RangeQuery(BoundingBox(
        max(ax - hw, dom.min_lon), max(ay - hh, dom.min_lat),
        min(ax + hw, dom.max_lon), min(ay + hh, dom.max_lat)))


def _calibrate(ds: Dataset, ax: float, ay: float, ratio: float,
               band_lo: int, band_hi: int, target: int) -> tuple[RangeQuery, int, bool]:
    """Bisect a scale factor until the exact count enters the band.

    The bracket starts at [0, scale covering the whole data bounds], so the
    accepted rectangle is the first probe whose count lands in the band.
    Counts are monotone in the scale, which keeps the bisection sound even
    though the rectangle is clipped to the data bounds.
    """
    dom = ds.bounds
    wu = math.sqrt(ratio) * 0.5
    hu = 0.5 / math.sqrt(ratio)
    count = ds.count_in_range

    lo = 0.0
    hi = max((ax - dom.min_lon) / wu, (dom.max_lon - ax) / wu,
             (ay - dom.min_lat) / hu, (dom.max_lat - ay) / hu)
    best_q = None
    best_c = 0
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        q = _clipped(ax, ay, mid * wu, mid * hu, dom)
        c = count(q)
        if band_lo <= c <= band_hi:
            return q, c, False
        if best_q is None or abs(c - target) < abs(best_c - target):
            best_q, best_c = q, c
        if c > band_hi:
            hi = mid
        else:
            lo = mid
    if best_q is None:
        # degenerate bracket: the anchor point is the only candidate
        q = _clipped(ax, ay, 0.0, 0.0, dom)
        c = count(q)
        return q, c, not band_lo <= c <= band_hi
    return best_q, best_c, True


def _generate(ds: Dataset, spec: WorkloadSpec) -> Workload:
    if spec.count < 1:
        raise ValueError("count must be >= 1")
    target = target_count(spec.selectivity, ds.n)
    band_lo, band_hi = tolerance_band(target, spec.tolerance)
    rng = SplitMix64(spec.seed)
    dom = ds.bounds
    wl = Workload(spec)
    uniform = spec.kind == "uniform"
    for _ in range(spec.count):
        if uniform:
            ax = dom.min_lon + rng.next_float() * dom.width
            ay = dom.min_lat + rng.next_float() * dom.height
        else:
            i = rng.next_below(ds.n)
            ax = float(ds.lons[i])
            ay = float(ds.lats[i])
        ratio = 0.25 * 16.0 ** rng.next_float()
        q, achieved, flagged = _calibrate(ds, ax, ay, ratio, band_lo, band_hi, target)
        wl.queries.append(q)
        wl.achieved.append(achieved)
        wl.flagged.append(flagged)
    return wl


def generate_skewed(ds: Dataset, selectivity: float, count: int, seed: int = 0,
                    tolerance: float = 0.1) -> Workload:
    """Queries anchored at data records, so they follow the data density."""
    return _generate(ds, WorkloadSpec("skewed", selectivity, count, seed, tolerance))


def generate_uniform(ds: Dataset, selectivity: float, count: int, seed: int = 0,
                     tolerance: float = 0.1) -> Workload:
    """Queries anchored uniformly over the data bounding box."""
    return _generate(ds, WorkloadSpec("uniform", selectivity, count, seed, tolerance))


def generate_workload(ds: Dataset, spec: WorkloadSpec) -> Workload:
    if spec.kind not in WORKLOAD_KINDS:
        raise ValueError(f"unknown workload kind {spec.kind!r}")
    return _generate(ds, spec)


def count_in_range(ds: Dataset, q: RangeQuery) -> int:
    """Exact count of dataset points inside the closed rectangle."""
    return ds.count_in_range(q)


def workload_to_csv(wl: Workload) -> str:
    s = wl.spec
    lines = [f"# selectivity={s.selectivity!r} kind={s.kind} seed={s.seed}"]
    for q in wl.queries:
        b = q.bounds
        lines.append(f"{b.min_lon:.17g},{b.min_lat:.17g},{b.max_lon:.17g},{b.max_lat:.17g}")
    lines.append("")
    return "\n".join(lines)


def workload_from_csv(text: str) -> Workload:
    meta: dict[str, str] = {}
    queries: list[RangeQuery] = []
    saw_header = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if not saw_header:
                for tok in line[1:].split():
                    if "=" in tok:
                        k, _, v = tok.partition("=")
                        meta[k] = v
                saw_header = True
            continue
        if not saw_header:
            raise ParseError(f"line {ln}: missing workload header")
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(f"line {ln}: expected 4 fields, got {len(parts)}")
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise ParseError(f"line {ln}: not a number: {line!r}") from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(f"line {ln}: non-finite bound")
        if vals[0] > vals[2] or vals[1] > vals[3]:
            raise ParseError(f"line {ln}: min exceeds max")
        queries.append(RangeQuery(BoundingBox(*vals)))
    if {"selectivity", "kind", "seed"} - meta.keys():
        raise ParseError("header must carry selectivity, kind, and seed")
    if meta["kind"] not in WORKLOAD_KINDS:
        raise ParseError(f"unknown workload kind {meta['kind']!r}")
    if not queries:
        raise ParseError("no queries found")
    try:
        spec = WorkloadSpec(meta["kind"], float(meta["selectivity"]),
                            len(queries), int(meta["seed"]))
    except ValueError:
        raise ParseError("malformed header value") from None
    return Workload(spec, queries)


def write_workload(path: str, wl: Workload) -> None:
    with open(path, "w") as fh:
        fh.write(workload_to_csv(wl))


def read_workload(path: str) -> Workload:
    with open(path) as fh:
        return workload_from_csv(fh.read())
