"""The unit every index hands to the query engine.

A partition is a run of points sorted ascending by lon (ties keep input
order), its bounding rectangle, and a rank model over the lon column.  Grid
indexes store their cell rectangle as the bounds; trees store the tight box
of the contents.
"""

import numpy as np

from .geometry import BoundingBox
from .spline import DEFAULT_MAX_ERROR, build_radix_spline


class Partition:
    __slots__ = ("bounds", "lons", "lats", "model")

    def __init__(self, lons: np.ndarray, lats: np.ndarray,
                 bounds: BoundingBox | None = None,
                 max_error: int = DEFAULT_MAX_ERROR,
                 radix_bits: int | None = None):
        order = np.argsort(lons, kind="stable")
        self.lons: list[float] = lons[order].tolist()
        self.lats: list[float] = lats[order].tolist()
        if bounds is None:
            bounds = BoundingBox(self.lons[0], float(lats.min()),
                                 self.lons[-1], float(lats.max()))
        self.bounds = bounds
        self.model = build_radix_spline(self.lons, max_error, radix_bits)

    @property
    def n(self) -> int:
        return len(self.lons)

    def size_bytes(self) -> int:
        # 16 bytes of point payload plus the bounds record and the model
        return 16 * len(self.lons) + 32 + self.model.size_bytes()

    def __repr__(self):
        return f"Partition(n={len(self.lons)}, bounds={tuple(self.bounds)})"
