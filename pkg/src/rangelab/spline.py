"""Order-preserving key mapping and a spline-over-radix position model.

The model approximates the rank function of a sorted key column: estimate(k)
lands within max_error positions of the first occurrence of k for every key
present at build time.  Lookups consult a radix prefix table to bracket the
spline segment, then interpolate linearly inside it.
"""

import math
import struct
from bisect import bisect_left
from typing import Iterable

from .errors import EmptyInputError, InvalidKeyError, UnsortedInputError

_PACK = struct.Struct("<d").pack
_UNPACK = struct.Struct("<Q").unpack

SIGN_BIT = 0x8000000000000000
MASK64 = 0xFFFFFFFFFFFFFFFF
DEFAULT_MAX_ERROR = 32
MAX_RADIX_BITS = 18

# corridor margins are shaved by this much so float roundoff in the slope
# comparisons can only tighten the error bound, never breach it
_CORRIDOR_EPS = 1e-9


def map_key(key: float) -> int:
    """Map a finite float to a uint64 whose unsigned order matches float order."""
    if not math.isfinite(key):
        raise InvalidKeyError(f"cannot map {key!r}")
    # adding 0.0 normalizes -0.0 so both zeros map identically
    if key >= 0.0:
        return _UNPACK(_PACK(key + 0.0))[0] | SIGN_BIT
    return _UNPACK(_PACK(key))[0] ^ MASK64


class RadixSplineModel:
    """Piecewise-linear rank approximation over an ascending key column."""

    __slots__ = ("keys", "positions", "slopes", "radix_table", "radix_bits",
                 "shift", "min_mapped", "max_mapped", "min_key", "max_key",
                 "max_error", "n", "build_reads")

    def __init__(self, keys, positions, slopes, radix_table, radix_bits, shift,
                 min_mapped, max_mapped, min_key, max_key, max_error, n, build_reads):
        self.keys = keys                # spline-point keys, strictly increasing
        self.positions = positions      # first-occurrence rank of each spline key
        self.slopes = slopes            # precomputed rise/run per segment
        self.radix_table = radix_table  # entry i = first spline index with prefix >= i
        self.radix_bits = radix_bits
        self.shift = shift
        self.min_mapped = min_mapped
        self.max_mapped = max_mapped
        self.min_key = min_key
        self.max_key = max_key
        self.max_error = max_error
        self.n = n
        self.build_reads = build_reads

    def segment_for(self, key: float, mapped: int) -> int:
        """Index of the spline segment whose key range covers `key`."""
        table = self.radix_table
        p = (mapped - self.min_mapped) >> self.shift
        j = table[p] - 1
        if j < 0:
            j = 0
        hi = table[p + 1] - 1
        last = len(self.keys) - 2
        if hi > last:
            hi = last
        if j > last:
            j = last
        keys = self.keys
        if hi - j > 8:
            # wide bracket (many spline points share the prefix): bisect it
            lo = j
            hi_b = hi + 1
            while lo < hi_b:
                mid = (lo + hi_b) >> 1
                if keys[mid + 1] <= key:
                    lo = mid + 1
                else:
                    hi_b = mid
            return lo
        while j < hi and keys[j + 1] <= key:
            j += 1
        return j

    def estimate(self, key: float) -> int:
        """Approximate first-occurrence rank of key, clamped to [0, n-1]."""
        mk = map_key(key)
        if mk <= self.min_mapped:
            return 0
        if mk >= self.max_mapped:
            # the largest build key estimates at its own first occurrence;
            # anything beyond it clamps to the end of the column
            return self.positions[-1] if mk == self.max_mapped else self.n - 1
        j = self.segment_for(key, mk)
        est = int(self.positions[j] + (key - self.keys[j]) * self.slopes[j] + 0.5)
        if est < 0:
            return 0
        n1 = self.n - 1
        return n1 if est > n1 else est

    def size_bytes(self) -> int:
        return 24 * len(self.keys) + 8 * len(self.radix_table) + 64


def build_radix_spline(keys: Iterable[float], max_error: int = DEFAULT_MAX_ERROR,
                       radix_bits: int | None = None) -> RadixSplineModel:
    """Build a model in one pass over ascending keys (each key read once).

    Duplicate keys are allowed; only the first occurrence of a value
    constrains the spline corridor.  radix_bits defaults to a table roughly
    twice the spline-point count, capped at MAX_RADIX_BITS.
    """
    if max_error < 1:
        raise ValueError(f"max_error must be >= 1, got {max_error}")
    if radix_bits is not None and not 1 <= radix_bits <= MAX_RADIX_BITS:
        raise ValueError(f"radix_bits must be in [1, {MAX_RADIX_BITS}]")

    sk: list[float] = []   # emitted spline keys
    sp: list[int] = []     # emitted spline positions
    hi_err = max_error - _CORRIDOR_EPS
    lo_err = -max_error + _CORRIDOR_EPS

    isfinite = math.isfinite
    reads = 0
    prev = None
    ax = ay = 0.0          # current anchor (last emitted spline point)
    cx, cy = 0.0, 0        # last accepted distinct point, candidate to emit
    su = sl = 0.0          # corridor slope bounds from the anchor
    have_corridor = False

    for k in keys:
        reads += 1
        if not isfinite(k):
            raise InvalidKeyError(f"key {reads - 1} is {k!r}")
        if prev is not None:
            if k < prev:
                raise UnsortedInputError(f"key {reads - 1} out of order")
            if k == prev:
                continue
        pos = reads - 1
        prev = k
        if not sk:
            ax, ay = k, 0.0
            sk.append(k)
            sp.append(0)
            cx, cy = k, 0
            continue
        if not have_corridor:
            dx = k - ax
            su = (pos + hi_err - ay) / dx
            sl = (pos + lo_err - ay) / dx
            cx, cy = k, pos
            have_corridor = True
            continue
        dx = k - ax
        s = (pos - ay) / dx
        if s < sl or s > su:
            # corridor violated: the previous point becomes a spline point
            sk.append(cx)
            sp.append(cy)
            ax, ay = cx, float(cy)
            dx = k - ax
            su = (pos + hi_err - ay) / dx
            sl = (pos + lo_err - ay) / dx
        else:
            shi = (pos + hi_err - ay) / dx
            slo = (pos + lo_err - ay) / dx
            if shi < su:
                su = shi
            if slo > sl:
                sl = slo
        cx, cy = k, pos

    if reads == 0:
        raise EmptyInputError("cannot build a model over zero keys")
    if not sk:
        raise EmptyInputError("keys were all non-finite")  # unreachable; guard
    if cx != sk[-1]:
        sk.append(cx)
        sp.append(cy)

    n = reads
    min_key = sk[0]
    max_key = sk[-1]
    min_mapped = map_key(min_key)
    max_mapped = map_key(max_key)

    if radix_bits is None:
        radix_bits = min(MAX_RADIX_BITS, max(2, (2 * len(sk)).bit_length()))
    span = max_mapped - min_mapped
    shift = max(0, span.bit_length() - radix_bits)

    size = (1 << radix_bits) + 1
    table = [0] * size
    pi = 0
    count = len(sk)
    for i in range(size):
        while pi < count and ((map_key(sk[pi]) - min_mapped) >> shift) < i:
            pi += 1
        table[i] = pi

    slopes = [0.0] * max(0, count - 1)
    for j in range(count - 1):
        s = (sp[j + 1] - sp[j]) / (sk[j + 1] - sk[j])
        # adjacent-float gaps overflow the slope; a zero slope keeps the
        # interpolation exact at the segment's own key and finite everywhere
        slopes[j] = s if math.isfinite(s) else 0.0

    return RadixSplineModel(sk, sp, slopes, table, radix_bits, shift,
                            min_mapped, max_mapped, min_key, max_key,
                            max_error, n, reads)


def search_lower_bound(model: RadixSplineModel, keys, key: float) -> int:
    """Exact first index with keys[i] >= key, using the model then local repair.

    Matches a plain binary lower bound on any input.  For keys that were
    present at build time the window around the estimate already brackets the
    answer; the fallbacks only fire for foreign keys or heavy duplication.
    """
    n = len(keys)
    est = model.estimate(key)
    e = model.max_error
    lo = est - e - 1
    if lo < 0:
        lo = 0
    hi = est + e + 1
    if hi > n:
        hi = n
    i = bisect_left(keys, key, lo, hi)
    if i == hi and hi < n:
        i = bisect_left(keys, key, hi, n)
    elif i == lo and lo > 0 and keys[lo - 1] >= key:
        i = bisect_left(keys, key, 0, lo)
    return i
