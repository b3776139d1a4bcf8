"""Deterministic random number generation.

Everything that needs randomness (splits, weight init, bootstraps, epoch
shuffles) draws from this one generator so runs are reproducible bit for
bit from a seed. The update is the splitmix64 mix; uniform doubles take
the top 53 bits.
"""

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TO_UNIT = 2.0**-53


class SplitMix64:
    """64-bit splitmix64 stream; state advances by the golden-gamma step."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1): top 53 bits scaled by 2**-53."""
        return (self.next_uint64() >> 11) * _TO_UNIT

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def randrange(self, n: int) -> int:
        """Integer in [0, n) via modulo reduction."""
        return self.next_uint64() % n

    def shuffle(self, seq) -> None:
        """In-place Fisher-Yates: i from n-1 down to 1, j = next() mod (i+1)."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.next_uint64() % (i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def sample_indices(self, n: int, k: int) -> list:
        """k distinct indices from range(n), ascending, by rejection draws."""
        if k >= n:
            return list(range(n))
        chosen = set()
        while len(chosen) < k:
            chosen.add(self.next_uint64() % n)
        return sorted(chosen)
