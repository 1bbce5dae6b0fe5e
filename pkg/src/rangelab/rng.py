"""Counter-based SplitMix64 generator, scalar and vectorized.

Both forms produce the same stream for the same seed: draw i (0-based) is
mix64(seed + (i+1) * GOLDEN).  That makes every consumer reproducible across
platforms and lets bulk generation use numpy without changing the values.
"""

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 2.0 ** -53


def mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential view of the stream; remembers how many draws were taken."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.drawn = 0

    def next_u64(self) -> int:
        self.drawn += 1
        return mix64((self.seed + self.drawn * GOLDEN) & MASK64)

    def next_float(self) -> float:
        # 53-bit mantissa draw in [0, 1)
        return (self.next_u64() >> 11) * _INV53

    def next_below(self, n: int) -> int:
        # floor of a float draw; bias is negligible for the n used here
        i = int(self.next_float() * n)
        return n - 1 if i >= n else i


def stream_u64(seed: int, start: int, count: int) -> np.ndarray:
    """Draws start..start+count-1 of the stream as uint64, vectorized."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def stream_floats(seed: int, start: int, count: int) -> np.ndarray:
    """Same draws as stream_u64, reduced to [0, 1) doubles."""
    return (stream_u64(seed, start, count) >> np.uint64(11)).astype(np.float64) * _INV53
