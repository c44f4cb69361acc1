"""Count-based near-optimal strategy for Player 2.

The posterior of the m-th candidate after the threshold is replaced by its
floor m/(m+1), so the state reduces to (moment, count).  The resulting rule
accepts the m-th candidate iff its moment is at least ``n_m``.  The values
computed here are the exact success probabilities of that rule, which makes
them lower bounds on the optimal values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from ._numeric import Number, Sums, unit, use_exact
from .classical import solve_p1
from .response import MAX_N, MIN_N, _first_pre_acceptance, _pre_threshold, next_candidate_mass


def _ceil(x: Number) -> int:
    if isinstance(x, Fraction):
        return -((-x.numerator) // x.denominator)
    return math.ceil(x)


def count_threshold_K(N: int, n: int, n_star: int | None = None) -> int:
    """Smallest candidate count at which a candidate at moment ``n`` is accepted.

    ``ceil(S2_n / (1 - S1_n))``, computed in exact arithmetic.
    """
    if n_star is None:
        n_star = solve_p1(N, exact=True).threshold
    if not n_star < n <= N:
        raise ValueError(f"K(n) is defined for n_star < n <= N (n_star={n_star}), got n={n}")
    sums = Sums(N, exact=True)
    s1 = sums.s1(n)
    if s1 >= 1:
        raise ValueError(f"S1 >= 1 at n={n}")
    return _ceil(sums.s2(n) / (1 - s1))


def w_approx(N: int, n: int, m: int, exact: bool | None = None) -> Number:
    """Payoff from accepting the next candidate when the current posterior is m/(m+1)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if not 2 <= n < N:
        raise ValueError(f"need 2 <= n < N, got n={n}")
    sums = Sums(N, use_exact(N, exact))
    one = sums.one
    return one * m * n / (N * (m + 1)) * sums.s1(n) + one * n * (n - 1) / (N * (m + 1)) * sums.t(n)


@dataclass(frozen=True)
class NearOptimalSolution:
    n_objects: int
    n_star: int
    m0: int
    n_m: Mapping[int, int]  # m -> smallest accepting moment, 1 <= m <= m0
    n0_a: int
    value: Number
    exact: bool
    va: Mapping[tuple[int, int], Number] = field(repr=False, compare=False)

    def threshold(self, m: int) -> int:
        return self.n_m[min(m, self.m0)]

    def accepts(self, n: int, m: int) -> bool:
        """Decision for the m-th candidate after the threshold, seen at moment n."""
        return n >= self.threshold(m)

    def to_dict(self) -> dict:
        return {
            "n": self.n_objects,
            "n_star": self.n_star,
            "m0": self.m0,
            "n_m": [{"m": m, "n": v} for m, v in sorted(self.n_m.items())],
            "n0": self.n0_a,
            "u2": self.value,
            "v_pre_threshold": self.va[(self.n_star - 1, -1)],
        }


def solve_near_optimal(N: int, exact: bool | None = None) -> NearOptimalSolution:
    if not MIN_N <= N <= MAX_N:
        raise ValueError(f"supported range is {MIN_N} <= N <= {MAX_N}, got {N}")
    return _solve(N, use_exact(N, exact))


@lru_cache(maxsize=32)
def _solve(N: int, exact: bool) -> NearOptimalSolution:
    one = unit(exact)
    ns = solve_p1(N, exact).threshold
    K = {n: count_threshold_K(N, n, ns) for n in range(ns + 1, N + 1)}
    m0 = next(m for m in range(1, N - ns + 1) if m >= K[ns + m])
    n_m = {m: next(n for n in range(ns + 1, N + 1) if K[n] <= m) for m in range(1, m0 + 1)}
    sums = Sums(N, exact)

    def tail(n: int, p: Number, k0: int) -> Number:
        return n * p / N * sums.s1_from(k0) + (1 - p) * n * (n - 1) / N * sums.t_from(max(k0, 3))

    va: dict[tuple[int, int], Number] = {}
    for m in range(m0 - 1, -1, -1):
        p = one * m / (m + 1)
        for n in range(N, ns + m - 1, -1):
            if n >= N:
                va[(n, m)] = one * 0
                continue
            k0 = max(n + 1, n_m[m + 1])
            total = tail(n, p, k0)
            for k in range(n + 1, k0):
                total += next_candidate_mass(n, k, p) * va[(k, m + 1)]
            va[(n, m)] = total
    for n in range(N, ns - 2, -1):
        va[(n, -1)] = sum((one * n / (k * (k - 1)) * va[(k, 0)] for k in range(n + 1, N + 1)), one * 0)
    pre = _pre_threshold(N, ns, va[(ns - 1, -1)], one)
    for n, v in pre.items():
        va[(n, -1)] = v
    n0 = _first_pre_acceptance(N, ns, pre, one)
    return NearOptimalSolution(
        n_objects=N, n_star=ns, m0=m0, n_m=n_m, n0_a=n0, value=pre[0], exact=exact, va=va,
    )
