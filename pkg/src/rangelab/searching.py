"""Hand-rolled ordered-sequence searches.

These loops are the interpreter-speed dialect shared by every code path whose
cost is compared across search techniques.  Timed paths must not swap in
C-accelerated equivalents for one technique only, so they all route here.
"""

from typing import Sequence


def lower_bound(seq: Sequence[float], key: float, lo: int = 0, hi: int | None = None) -> int:
    """First index in [lo, hi) whose value is >= key; hi if none."""
    if hi is None:
        hi = len(seq)
    while lo < hi:
        mid = (lo + hi) >> 1
        if seq[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo


def upper_bound(seq: Sequence[float], key: float, lo: int = 0, hi: int | None = None) -> int:
    """First index in [lo, hi) whose value is > key; hi if none."""
    if hi is None:
        hi = len(seq)
    while lo < hi:
        mid = (lo + hi) >> 1
        if seq[mid] <= key:
            lo = mid + 1
        else:
            hi = mid
    return lo
