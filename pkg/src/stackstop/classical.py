"""Player 1's problem: the classical secretary problem.

Player 1 has priority, so at equilibrium she simply plays the optimal
no-recall rule: reject the first ``n_star - 1`` objects, then accept the first
object that is best so far.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from ._numeric import Number, Sums, unit, use_exact


@dataclass(frozen=True)
class P1Solution:
    n_objects: int
    threshold: int
    u: tuple  # u[0..N]
    z: Mapping[int, Number]  # z[n] for threshold-1 <= n <= N

    @property
    def value(self) -> Number:
        return self.u[0]


def solve_p1(N: int, exact: bool | None = None) -> P1Solution:
    """Backward induction for the secretary problem with ``N`` objects.

    ``u[n]`` is the optimal success probability after ``n`` objects have been
    seen and rejected.  The threshold is the smallest ``n`` with
    ``n/N >= u[n]``; ties are resolved in favour of accepting.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    exact = use_exact(N, exact)
    one = unit(exact)
    u = [one * 0] * (N + 1)
    for n in range(N - 1, -1, -1):
        accept = one * (n + 1) / N
        u[n] = max(accept, u[n + 1]) / (n + 1) + n * u[n + 1] / (n + 1)
    threshold = next(n for n in range(1, N + 1) if one * n / N >= u[n])
    z = {n: stopping_reward_z(N, n, exact) for n in range(threshold - 1, N)}
    z[N] = one * 0
    return P1Solution(N, threshold, tuple(u), z)


def p1_threshold_index(N: int) -> int:
    """Smallest ``n`` with ``sum_{k=n+1}^{N} 1/(k-1) <= 1`` (exact arithmetic)."""
    sums = Sums(N, exact=True)
    return next(n for n in range(1, N + 1) if sums.s1(n) <= 1)


def stopping_reward_z(N: int, n: int, exact: bool | None = None) -> Number:
    """Reward from accepting the next relatively best object after moment ``n``.

    For ``n = 0`` the first object is always relatively best, so the reward
    is ``1/N``.
    """
    if not 0 <= n < N:
        raise ValueError(f"need 0 <= n < N, got n={n}, N={N}")
    exact = use_exact(N, exact)
    one = unit(exact)
    if n == 0:
        return one / N
    return one * n / N * Sums(N, exact).s1(n)


def candidate_gap_distribution(n: int, k: int, N: int, rank: int = 1, exact: bool | None = None) -> Number:
    """Probability that the next object of relative rank ``<= rank`` after
    moment ``n`` appears at moment ``k``.

    ``k = N + 1`` is the sentinel for "no such object appears".
    """
    if rank not in (1, 2):
        raise ValueError("rank must be 1 or 2")
    if n < rank or n >= N + 1:
        raise ValueError(f"moment n={n} out of range for rank {rank}")
    if not n < k <= N + 1:
        raise ValueError(f"need n < k <= N+1, got n={n}, k={k}")
    one = unit(use_exact(N, exact))
    if rank == 1:
        if k == N + 1:
            return one * n / N
        return one * n / ((k - 1) * k)
    if k == N + 1:
        return one * n * (n - 1) / (N * (N - 1))
    return one * 2 * n * (n - 1) / (k * (k - 1) * (k - 2))


def asymptotic_z_y(t: float) -> tuple[float, float]:
    """Limits of ``z_n`` and ``y_n`` at time ``t = n/N``.

    ``z(t) = -t ln t`` accepts the next relatively best object; ``y(t) = t(1-t)``
    accepts the next object of relative rank at most two after a rank-2
    candidate.
    """
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    return -t * math.log(t), t * (1 - t)
