"""Point datasets: synthetic generators and the two on-disk formats.

Generation is seed-deterministic and identical between the scalar and
vectorized generator paths because both consume the same counter-based
stream.  Draw layout per point is fixed: uniform datasets take (lon, lat)
pairs; cluster datasets take 2k center draws up front, then a
(pick, u1, u2) triple per point.
"""

import math
import struct
from dataclasses import dataclass

import numpy as np

from .counting import CountingGrid
from .errors import EmptyInputError, ParseError
from .geometry import BoundingBox, RangeQuery
from .rng import stream_floats

DEFAULT_DOMAIN = BoundingBox(-180.0, -90.0, 180.0, 90.0)
DATASET_KINDS = ("uniform", "clusters")

_HDR = struct.Struct("<Q")


class Dataset:
    """Immutable 2-D point set with a lazily built counting structure."""

    def __init__(self, lons, lats):
        lons = np.ascontiguousarray(lons, dtype=np.float64)
        lats = np.ascontiguousarray(lats, dtype=np.float64)
        if len(lons) != len(lats):
            raise ValueError("lon and lat columns differ in length")
        if len(lons) == 0:
            raise EmptyInputError("a dataset needs at least one point")
        if not (np.isfinite(lons).all() and np.isfinite(lats).all()):
            raise ValueError("dataset contains non-finite coordinates")
        self.lons = lons
        self.lats = lats
        self.bounds = BoundingBox(float(lons.min()), float(lats.min()),
                                  float(lons.max()), float(lats.max()))
        self._grid: CountingGrid | None = None

    @property
    def n(self) -> int:
        return len(self.lons)

    @property
    def grid(self) -> CountingGrid:
        if self._grid is None:
            self._grid = CountingGrid(self.lons, self.lats, self.bounds)
        return self._grid

    def count_in_range(self, q: RangeQuery) -> int:
        """Exact number of points inside the closed rectangle."""
        return self.grid.count(q)


@dataclass(frozen=True)
class DatasetSpec:
    kind: str = "clusters"
    n: int = 0
    seed: int = 0
    domain: BoundingBox = DEFAULT_DOMAIN
    clusters: int = 8
    spread: float = 2.0


def generate_uniform_box(n: int, domain: BoundingBox = DEFAULT_DOMAIN, seed: int = 0) -> Dataset:
    """n independent points uniform over the domain box."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = stream_floats(seed, 0, 2 * n)
    lons = domain.min_lon + u[0::2] * domain.width
    lats = domain.min_lat + u[1::2] * domain.height
    return Dataset(lons, lats)


def generate_clusters(n: int, domain: BoundingBox = DEFAULT_DOMAIN, seed: int = 0,
                      clusters: int = 8, spread: float = 2.0) -> Dataset:
    """n points in Gaussian blobs around uniformly placed centers.

    Offsets are Box-Muller normals scaled by `spread` (in coordinate units);
    points are clipped to the domain box.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if clusters < 1:
        raise ValueError("clusters must be >= 1")
    k = clusters
    cu = stream_floats(seed, 0, 2 * k)
    cx = domain.min_lon + cu[0::2] * domain.width
    cy = domain.min_lat + cu[1::2] * domain.height

    u = stream_floats(seed, 2 * k, 3 * n)
    pick = np.minimum((u[0::3] * k).astype(np.int64), k - 1)
    r = spread * np.sqrt(-2.0 * np.log(1.0 - u[1::3]))
    theta = (2.0 * math.pi) * u[2::3]
    lons = np.clip(cx[pick] + r * np.cos(theta), domain.min_lon, domain.max_lon)
    lats = np.clip(cy[pick] + r * np.sin(theta), domain.min_lat, domain.max_lat)
    return Dataset(lons, lats)


def generate_dataset(spec: DatasetSpec) -> Dataset:
    if spec.kind == "uniform":
        return generate_uniform_box(spec.n, spec.domain, spec.seed)
    if spec.kind == "clusters":
        return generate_clusters(spec.n, spec.domain, spec.seed,
                                 spec.clusters, spec.spread)
    raise ValueError(f"unknown dataset kind {spec.kind!r}")


def dataset_to_csv(ds: Dataset) -> str:
    lines = [f"# points={ds.n}"]
    lines.extend(f"{x:.17g},{y:.17g}" for x, y in zip(ds.lons, ds.lats))
    lines.append("")
    return "\n".join(lines)


def dataset_from_csv(text: str) -> Dataset:
    lons: list[float] = []
    lats: list[float] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"line {ln}: expected 2 fields, got {len(parts)}")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(f"line {ln}: not a number: {line!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(f"line {ln}: non-finite coordinate")
        lons.append(x)
        lats.append(y)
    if not lons:
        raise ParseError("no data rows found")
    return Dataset(np.array(lons), np.array(lats))


def dataset_to_binary(ds: Dataset) -> bytes:
    body = np.column_stack((ds.lons, ds.lats)).astype("<f8").tobytes()
    return _HDR.pack(ds.n) + body


def dataset_from_binary(blob: bytes) -> Dataset:
    if len(blob) < _HDR.size:
        raise ParseError("truncated header")
    (n,) = _HDR.unpack_from(blob)
    expect = _HDR.size + 16 * n
    if len(blob) != expect:
        raise ParseError(f"expected {expect} bytes for {n} points, got {len(blob)}")
    if n == 0:
        raise ParseError("zero points")
    flat = np.frombuffer(blob, dtype="<f8", offset=_HDR.size)
    pts = flat.reshape(n, 2)
    if not np.isfinite(pts).all():
        raise ParseError("non-finite coordinate")
    return Dataset(pts[:, 0].copy(), pts[:, 1].copy())


def write_dataset(path: str, ds: Dataset, fmt: str = "binary") -> None:
    if fmt == "csv":
        with open(path, "w") as fh:
            fh.write(dataset_to_csv(ds))
    elif fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(dataset_to_binary(ds))
    else:
        raise ValueError(f"unknown dataset format {fmt!r}")


def read_dataset(path: str, fmt: str | None = None) -> Dataset:
    """Load a dataset file; format inferred from the extension unless given."""
    if fmt is None:
        fmt = "csv" if path.endswith(".csv") else "binary"
    if fmt == "csv":
        with open(path) as fh:
            return dataset_from_csv(fh.read())
    with open(path, "rb") as fh:
        return dataset_from_binary(fh.read())
