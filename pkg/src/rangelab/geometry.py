"""Points, rectangles, and the closed-interval predicates used everywhere.

All rectangle predicates treat boundaries as inclusive: a query whose edge
touches a point or box still matches it.
"""

import math
from typing import NamedTuple

from .errors import InvalidBoxError


class Point(NamedTuple):
    lon: float
    lat: float


class BoundingBox(NamedTuple):
    min_lon: float
    min_lat: float
    max_lon: float
    max_lat: float

    @property
    def width(self) -> float:
        return self.max_lon - self.min_lon

    @property
    def height(self) -> float:
        return self.max_lat - self.min_lat

    def validated(self) -> "BoundingBox":
        for v in self:
            if not math.isfinite(v):
                raise InvalidBoxError(f"non-finite corner in {self!r}")
        if self.min_lon > self.max_lon or self.min_lat > self.max_lat:
            raise InvalidBoxError(f"min exceeds max in {self!r}")
        return self


class RangeQuery(NamedTuple):
    """An axis-aligned rectangle query; degenerate edges are allowed."""

    bounds: BoundingBox

    @classmethod
    def of(cls, min_lon: float, min_lat: float, max_lon: float, max_lat: float) -> "RangeQuery":
        return cls(BoundingBox(min_lon, min_lat, max_lon, max_lat).validated())


def box(min_lon: float, min_lat: float, max_lon: float, max_lat: float) -> BoundingBox:
    return BoundingBox(min_lon, min_lat, max_lon, max_lat).validated()


def intersects(q: RangeQuery, b: BoundingBox) -> bool:
    """True when the query rectangle and the box share at least one point."""
    qb = q.bounds
    return (qb.min_lon <= b.max_lon and b.min_lon <= qb.max_lon
            and qb.min_lat <= b.max_lat and b.min_lat <= qb.max_lat)


def contains_box(q: RangeQuery, b: BoundingBox) -> bool:
    """True when the box lies entirely inside the query rectangle."""
    qb = q.bounds
    return (qb.min_lon <= b.min_lon and b.max_lon <= qb.max_lon
            and qb.min_lat <= b.min_lat and b.max_lat <= qb.max_lat)


def contains_point(q: RangeQuery, p: Point) -> bool:
    qb = q.bounds
    return qb.min_lon <= p.lon <= qb.max_lon and qb.min_lat <= p.lat <= qb.max_lat
