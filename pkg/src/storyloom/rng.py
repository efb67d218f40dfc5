"""Deterministic 64-bit PRNG shared by grammar expansion and worldgen.

SplitMix64 is used instead of ``random.Random`` because its sequence is
trivially reproducible in other runtimes (the browser explorer replays
grammar expansions with the same generator), and its state is a single
64-bit integer.
"""

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Steele et al.'s splitmix64 generator over Python ints."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform-ish draw in [0, n).  Modulo bias is negligible for the
        small n used at grammar choice points."""
        return self.next_u64() % n
