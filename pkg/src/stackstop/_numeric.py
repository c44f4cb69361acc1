"""Shared arithmetic helpers: exact/float selection and the harmonic-type sums
that every finite-N solver uses."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Union

Number = Union[Fraction, float]

# Exact rational arithmetic is used up to this many objects.
EXACT_LIMIT = 12


def use_exact(n_objects: int, exact: bool | None) -> bool:
    if exact is None:
        return n_objects <= EXACT_LIMIT
    return exact


def unit(exact: bool) -> Number:
    return Fraction(1) if exact else 1.0


@lru_cache(maxsize=64)
def _harmonic_exact(size: int) -> tuple[Fraction, ...]:
    out = [Fraction(0)]
    for j in range(1, size + 1):
        out.append(out[-1] + Fraction(1, j))
    return tuple(out)


@lru_cache(maxsize=64)
def _harmonic_float(size: int) -> tuple[float, ...]:
    # Built from the exact table so that float and exact modes agree to rounding.
    if size <= 2000:
        return tuple(float(h) for h in _harmonic_exact(size))
    out = [0.0]
    for j in range(1, size + 1):
        out.append(out[-1] + 1.0 / j)
    return tuple(out)


def harmonic(size: int, exact: bool) -> tuple[Number, ...]:
    """Table ``H[0..size]`` of partial harmonic sums."""
    return _harmonic_exact(size) if exact else _harmonic_float(size)


class Sums:
    """Partial sums over the tail ``k = n+1 .. N`` for a fixed ``N``.

    ``s1(n)``  = sum 1/(k-1)
    ``t(n)``   = sum 1/((k-1)(k-2))      (telescopes to 1/(n-1) - 1/(N-1))
    ``s2(n)``  = (n-1) * t(n)            (= (N-n)/(N-1))
    """

    def __init__(self, n_objects: int, exact: bool):
        self.N = n_objects
        self.exact = exact
        self.one = unit(exact)
        self._h = harmonic(max(n_objects, 1), exact)

    def s1(self, n: int) -> Number:
        """Sum of 1/(k-1) for k = n+1..N; requires n >= 1."""
        if n >= self.N:
            return self.one * 0
        return self._h[self.N - 1] - self._h[n - 1]

    def s1_from(self, k0: int) -> Number:
        """Sum of 1/(k-1) for k = k0..N; requires k0 >= 2."""
        if k0 > self.N:
            return self.one * 0
        return self._h[self.N - 1] - self._h[k0 - 2]

    def t(self, n: int) -> Number:
        """Sum of 1/((k-1)(k-2)) for k = n+1..N; requires n >= 2."""
        if n >= self.N:
            return self.one * 0
        return self.one / (n - 1) - self.one / (self.N - 1)

    def t_from(self, k0: int) -> Number:
        """Sum of 1/((k-1)(k-2)) for k = k0..N; requires k0 >= 3."""
        if k0 > self.N:
            return self.one * 0
        return self.one / (k0 - 2) - self.one / (self.N - 1)

    def s2(self, n: int) -> Number:
        if n >= self.N:
            return self.one * 0
        return self.one * (self.N - n) / (self.N - 1)
