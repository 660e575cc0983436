"""Counter-based deterministic random source (SplitMix64).

Every draw is ``mix64(seed + counter * GAMMA)`` where ``mix64`` is the
published SplitMix64 finalizer, so a stream is a pure function of
(seed, counter) and reproduces bit-identically on any platform.  Child
streams are derived by hashing (seed, index), never by sharing state.
"""

import math

from physbench.errors import InvalidRange

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / (1 << 53)


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_child_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for stream ``index`` under a base seed."""
    if index < 0:
        raise InvalidRange(f"child index must be >= 0, got {index}")
    return _mix64((seed ^ _mix64(((index + 1) * _GAMMA) & _MASK64)) & _MASK64)


class Rng:
    """Single-owner random stream; derive children instead of sharing."""

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return _mix64((self.seed + self.counter * _GAMMA) & _MASK64)

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform draw in [lo, hi); degenerate [c, c] always returns c."""
        if lo > hi:
            raise InvalidRange(f"uniform bounds out of order: [{lo}, {hi}]")
        u = (self.next_u64() >> 11) * _INV_2_53
        value = lo + u * (hi - lo)
        if value >= hi and hi > lo:
            # rounding can land exactly on hi for wide intervals
            value = math.nextafter(hi, lo)
        return value

    def below(self, n: int) -> int:
        """Integer in [0, n) via the multiply-shift reduction."""
        if n <= 0:
            raise InvalidRange(f"below() needs n > 0, got {n}")
        return (self.next_u64() * n) >> 64

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates permutation of range(n)."""
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            order[i], order[j] = order[j], order[i]
        return order

    def child(self, index: int) -> "Rng":
        return Rng(derive_child_seed(self.seed, index))
