"""Deterministic random streams for reproducible simulations.

All randomness in this package flows through :class:`Stream`, a small
splitmix64 generator (Steele, Lea & Flood 2014; finalizer constants from
Vigna's reference implementation).  The choice is deliberate: the compiled
trial kernel and the pure-Python fallback must consume *bit-identical*
random sequences so that a run is byte-reproducible regardless of which
backend happens to be importable.  splitmix64 is a handful of 64-bit
integer operations, trivially portable between Python and C.

Streams are splittable by hashing: ``derive(seed, *indices)`` mixes an
ordered tuple of integers (a "stream path", e.g. ``(domain, dist_index,
trial_index)``) into an independent 64-bit state.  Two distinct paths give
statistically independent streams, so per-trial streams can be created in
any order or in parallel without sharing state.
"""

from __future__ import annotations

from typing import Sequence

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15

# Derivation domains.  Keep values stable: they are part of the on-disk
# reproducibility contract (a seed + stream path identifies every draw).
DOMAIN_ASSIGNMENT = 1
DOMAIN_TRIAL = 2
DOMAIN_START_SAMPLE = 3
DOMAIN_GENERATE = 4
DOMAIN_DEFENSE = 5


def _mix(z: int) -> int:
    """splitmix64 output finalizer: a bijective 64-bit hash."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive(seed: int, *indices: int) -> int:
    """Hash ``seed`` and a stream path into an independent 64-bit state."""
    state = _mix(seed & _MASK64)
    for ix in indices:
        state = _mix(state ^ _mix((ix + 1) * _GOLDEN))
    return state


class Stream:
    """A splitmix64 draw stream.

    The three primitive draws (``next_u64``, ``random``, ``randrange``)
    define the consumption contract the compiled kernel replicates; any
    change here is a breaking change for recorded runs.
    """

    __slots__ = ("_state",)

    def __init__(self, state: int):
        self._state = state & _MASK64

    @classmethod
    def from_path(cls, seed: int, *indices: int) -> "Stream":
        return cls(derive(seed, *indices))

    @property
    def state(self) -> int:
        return self._state

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix(self._state)

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randrange(self, n: int) -> int:
        """Unbiased uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("randrange() bound must be positive")
        # Reject below 2**64 mod n, then reduce (OpenBSD-style bounded draw).
        threshold = ((1 << 64) - n) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n

    def choice(self, seq: Sequence) -> object:
        if not len(seq):
            raise ValueError("choice() on empty sequence")
        return seq[self.randrange(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, population: int, k: int) -> list[int]:
        """k distinct integers drawn uniformly from range(population).

        Partial Fisher-Yates; order of the returned list is the draw order.
        """
        if not 0 <= k <= population:
            raise ValueError(f"cannot sample {k} of {population}")
        pool = list(range(population))
        for i in range(k):
            j = i + self.randrange(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def weighted_index(self, weights: Sequence[float]) -> int:
        """Index draw proportional to non-negative weights.

        Falls back to a uniform draw when all weights are zero.  Uses a
        two-pass left-to-right prefix scan; the compiled kernel performs
        the identical float arithmetic in the identical order.
        """
        total = 0.0
        for w in weights:
            total += w
        if total <= 0.0:
            return self.randrange(len(weights))
        target = self.random() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if target < acc:
                return i
        return len(weights) - 1  # guards fp dust on the last element
