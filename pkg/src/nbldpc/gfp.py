"""Arithmetic over GF(p) for small odd primes.

Symbols are plain Python ints (or integer numpy arrays) holding canonical
residues in ``[0, p)``. Signed inputs are always floor-reduced, so ``-1``
maps to ``p - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomain, ZeroInverse

MAX_PRIME = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field GF(p), p odd."""

    p: int

    def __post_init__(self):
        p = self.p
        if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
            raise OutOfDomain(f"field order must be an integer, got {p!r}")
        if p > MAX_PRIME:
            raise OutOfDomain(f"field order {p} exceeds {MAX_PRIME}")
        if not is_prime(int(p)):
            raise OutOfDomain(f"field order {p} is not prime")
        if p == 2:
            raise OutOfDomain("binary field is not supported; use an odd prime")
        object.__setattr__(self, "p", int(p))

    def symbol(self, x):
        """Reduce a signed integer (or integer array) to its canonical residue."""
        if isinstance(x, np.ndarray):
            return np.mod(x, self.p)
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroInverse(f"0 has no inverse in GF({self.p})")
        return pow(a, -1, self.p)

    def inverse_table(self) -> np.ndarray:
        """Inverses of 0..p-1; entry 0 is 0 as a placeholder."""
        table = np.zeros(self.p, dtype=np.int64)
        for a in range(1, self.p):
            table[a] = pow(a, -1, self.p)
        return table

    def residue_distance(self, y, k):
        """Distance from integer ``y`` to the nearest integer congruent to ``k``.

        Works elementwise on numpy arrays. The result lies in ``[0, p // 2]``.
        """
        d = np.mod(np.subtract(y, k), self.p)
        out = np.minimum(d, self.p - d)
        return int(out) if np.ndim(out) == 0 else out

    def interpret(self, y, k):
        """The integer congruent to ``k`` closest to ``y``.

        Unique because p is odd and ``y`` is an integer.
        """
        d = np.mod(np.subtract(k, y), self.p)
        step = np.where(d <= self.p // 2, d, d - self.p)
        out = np.add(y, step)
        return int(out) if np.ndim(out) == 0 else out
