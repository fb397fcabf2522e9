"""Counter-based random streams with exact rational coins.

Every trial owns one :class:`RandomStream` keyed by ``(seed, trial_index)``,
so results never depend on scheduling or on how many workers ran.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

_BUFFER = 512
_TWO_128 = 1 << 128


class RandomStream:
    """Philox stream producing 128-bit uniforms.

    A coin with exact rational bias ``q`` lands iff ``U < q * 2**128`` where
    ``U`` is a uniform 128-bit integer, compared in integer arithmetic.
    """

    def __init__(self, seed: int, *key: int):
        seq = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, *key])
        self._bitgen = np.random.Philox(seq)
        self._buf: list[int] = []
        self._pos = 0

    def _word(self) -> int:
        if self._pos >= len(self._buf):
            self._buf = self._bitgen.random_raw(_BUFFER).tolist()
            self._pos = 0
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def bits128(self) -> int:
        return (self._word() << 64) | self._word()

    def bernoulli(self, q: Fraction) -> bool:
        num, den = q.numerator, q.denominator
        if num <= 0:
            return False
        if num >= den:
            return True
        return self.bits128() * den < (num << 128)

    def randbelow(self, k: int) -> int:
        # rejection sampling on 128-bit words keeps the draw exactly uniform
        limit = _TWO_128 - (_TWO_128 % k)
        while True:
            u = self.bits128()
            if u < limit:
                return u % k

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def child(self, *key: int) -> "RandomStream":
        """Independent sub-stream derived from fresh words of this one."""
        return RandomStream(self._word(), *key)

    def py_random(self) -> random.Random:
        """A stdlib generator seeded from this stream (for non-exact helpers)."""
        return random.Random(self.bits128())


def trial_stream(seed: int, trial: int) -> RandomStream:
    return RandomStream(seed, trial)
