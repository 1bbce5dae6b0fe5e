"""Shared fixtures: small datasets and a brute-force result oracle."""

import numpy as np
import pytest

from rangelab import Dataset, RangeQuery, generate_clusters


def brute_pairs(ds: Dataset, q: RangeQuery) -> list:
    """All (lon, lat) tuples inside the closed rectangle, sorted."""
    b = q.bounds
    m = ((ds.lons >= b.min_lon) & (ds.lons <= b.max_lon)
         & (ds.lats >= b.min_lat) & (ds.lats <= b.max_lat))
    return sorted(zip(ds.lons[m].tolist(), ds.lats[m].tolist()))


@pytest.fixture(scope="session")
def small_clustered() -> Dataset:
    return generate_clusters(5000, seed=3)


@pytest.fixture(scope="session")
def tiny_grid() -> Dataset:
    # a 20x20 lattice with known counts under any aligned rectangle
    xs, ys = np.meshgrid(np.arange(20.0), np.arange(20.0))
    return Dataset(xs.ravel(), ys.ravel())
