"""Player 2's optimal response to Player 1's threshold rule, for finite N.

State after rejecting a candidate at moment ``n``:

* ``(n, p)`` with ``p`` the posterior that the rejected candidate was
  relatively best (Player 1 has already accepted),
* ``(n, 0)``: Player 1 has accepted, no candidate since,
* ``(n, -1)``: Player 1 is still searching.

After the threshold a one-step look-ahead rule is optimal: accept at moment
``n`` iff ``p >= q_n``.  Before the threshold Player 2 accepts any candidate
from moment ``n0`` on.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Hashable, Mapping

from ._numeric import Number, Sums, unit, use_exact
from .classical import solve_p1
from .posterior import NO_CANDIDATE, P1_SEARCHING, PosteriorState, update_posterior

MIN_N = 3
MAX_N = 500


def _check_range(N: int) -> None:
    if not MIN_N <= N <= MAX_N:
        raise ValueError(f"the exact solver supports {MIN_N} <= N <= {MAX_N}, got {N}")


def q_threshold(N: int, n: int, exact: bool | None = None, n_star: int | None = None) -> Number:
    """Posterior threshold for accepting a candidate at moment ``n > n_star``."""
    exact = use_exact(N, exact)
    if n_star is None:
        n_star = solve_p1(N, exact=True).threshold
    if not n_star < n <= N:
        raise ValueError(f"q_n is defined for n_star < n <= N (n_star={n_star}), got n={n}")
    sums = Sums(N, exact)
    s2 = sums.s2(n)
    return s2 / (1 + s2 - sums.s1(n))


def stop_now_reward(N: int, n: int, p: Number) -> Number:
    """Success probability of accepting a candidate at ``n`` with posterior ``p``."""
    if not 0 <= n <= N:
        raise ValueError("moment out of range")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return n * p / N


def one_step_reward_w(N: int, n: int, p: Number, exact: bool | None = None) -> Number:
    """Reward from rejecting now and accepting the next candidate.

    ``p * z_n + (1 - p) * y_n``.
    """
    if not 2 <= n < N:
        raise ValueError(f"need 2 <= n < N, got n={n}")
    exact = use_exact(N, exact)
    sums = Sums(N, exact)
    p = unit(exact) * p
    return n * p / N * sums.s1(n) + (1 - p) * n * (n - 1) / N * sums.t(n)


def next_candidate_mass(n: int, k: int, p: Number) -> Number:
    """P(next candidate at k | candidate at n has posterior p)."""
    return n * p / (k * (k - 1)) + 2 * n * (n - 1) * (1 - p) / (k * (k - 1) * (k - 2))


@dataclass(frozen=True)
class Clause:
    """One line of an a-priori description of Player 2's strategy."""

    index: int | None  # candidate index after the threshold; None for the pre-threshold clause
    text: str
    from_moment: int | None = None
    conditional: Mapping[int, tuple] = field(default_factory=dict)


@dataclass(frozen=True)
class GameSolution:
    n_objects: int
    n_star: int
    n0: int
    n1: int | None
    u1: Number
    u2: Number
    q_table: Mapping[int, Number]
    exact: bool
    v_cache: Mapping[Hashable, Number] = field(repr=False, compare=False)
    pre_values: Mapping[int, Number] = field(repr=False, compare=False)
    strategy_summary: tuple[Clause, ...] = field(default=(), compare=False)
    _solver: object = field(default=None, repr=False, compare=False)

    def accepts(self, n: int, p: Number) -> bool:
        """Decision for a post-threshold candidate at ``n`` with posterior ``p``."""
        return p >= self.q_table[n]

    def value(self, state: PosteriorState) -> Number:
        return self._solver.value(state)

    def to_dict(self) -> dict:
        return {
            "n": self.n_objects,
            "n_star": self.n_star,
            "n0": self.n0,
            "n1": self.n1,
            "u1": self.u1,
            "u2": self.u2,
            "q_table": [{"n": n, "q": q} for n, q in sorted(self.q_table.items())],
            "strategy_summary": [c.text for c in self.strategy_summary],
        }


class _Solver:
    """Demand-driven evaluation of the post-threshold value functions."""

    def __init__(self, N: int, n_star: int, q: Mapping[int, Number], exact: bool):
        self.N = N
        self.n_star = n_star
        self.q = q
        self.exact = exact
        self.one = unit(exact)
        self.sums = Sums(N, exact)
        self.cache: dict[Hashable, Number] = {}

    def _key(self, n: int, p: Number, history: tuple[int, ...]):
        return (n, p) if self.exact else (n, history)

    def first_accepting(self, n: int, p: Number) -> int:
        """Smallest k > n at which the next candidate would be accepted."""
        for k in range(n + 1, self.N + 1):
            if update_posterior(n, k, p) >= self.q[k]:
                return k
        return self.N + 1  # q_N = 0, never reached

    def accept_tail(self, n: int, p: Number, k0: int) -> Number:
        """Expected reward from accepting the next candidate if it comes at k >= k0."""
        N, s = self.N, self.sums
        return n * p / N * s.s1_from(k0) + (1 - p) * n * (n - 1) / N * s.t_from(max(k0, 3))

    def post(self, n: int, p: Number, history: tuple[int, ...] = ()) -> Number:
        """v(n, p) for n >= n_star; p = 0 is the no-candidate state."""
        if n >= self.N:
            return self.one * 0
        key = self._key(n, p, history)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        k0 = self.first_accepting(n, p)
        total = self.accept_tail(n, p, k0)
        for k in range(n + 1, k0):
            pk = update_posterior(n, k, p)
            total += next_candidate_mass(n, k, p) * self.post(k, pk, history + (k,))
        self.cache[key] = total
        return total

    def searching(self, n: int) -> Number:
        """v(n, -1) for n >= n_star - 1: condition on Player 1's acceptance moment."""
        key = (n, -1)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        total = self.one * 0
        for k in range(n + 1, self.N + 1):
            total += self.one * n / (k * (k - 1)) * self.post(k, self.one * 0)
        self.cache[key] = total
        return total

    def value(self, state: PosteriorState) -> Number:
        n, m = state.moment, state.count
        if not 0 <= n <= self.N:
            raise ValueError("moment out of range")
        if m == P1_SEARCHING:
            if n >= self.n_star - 1:
                return self.searching(n)
            return self.pre[n]
        if n < self.n_star:
            raise ValueError("Player 1 cannot have accepted before her threshold")
        if m == NO_CANDIDATE:
            return self.post(n, self.one * 0)
        if n < self.n_star + m:
            raise ValueError(f"candidate {m} cannot appear before moment {self.n_star + m}")
        p = state.p
        if p < self.one * m / (m + 1):
            raise ValueError(f"posterior {p} of candidate {m} is below its floor m/(m+1)")
        if state.history is not None:
            if state.history[-1] != n or state.history[0] <= self.n_star:
                raise ValueError("history inconsistent with the state")
            return self.post(n, p, tuple(state.history))
        # Float mode keyed by a history; a bare posterior gets its own key space.
        return self.post(n, p, ("p", p))


def _pre_threshold(N: int, n_star: int, v_last: Number, one: Number) -> dict[int, Number]:
    """v(n, -1) for n < n_star - 1 by backward induction.

    Before the threshold every Player-2 candidate is relatively best, so it is
    worth ``k/N`` on acceptance.  ``v_last`` is ``v(n_star - 1, -1)``.
    """
    last = n_star - 1
    v = {last: v_last}
    for n in range(last - 1, -1, -1):
        if n == 0:
            v[0] = max(one / N, v[1]) if last >= 1 else v_last
            continue
        total = one * n / last * v_last
        for k in range(n + 1, last + 1):
            total += one * n / (k * (k - 1)) * max(one * k / N, v[k])
        v[n] = total
    return v


def _first_pre_acceptance(N: int, n_star: int, pre: Mapping[int, Number], one: Number) -> int:
    for n in range(1, n_star):
        if one * n / N >= pre[n]:
            return n
    return n_star


def pre_threshold_n0(N: int, exact: bool | None = None) -> int:
    """Earliest moment before the threshold at which Player 2 accepts a candidate.

    Smallest ``n`` with ``1 >= N v(n*-1, -1)/(n*-1) + sum_{k=n+1}^{n*-1} 1/(k-1)``.
    Returns ``n_star`` if no such moment exists.
    """
    sol = solve_game(N, exact=exact, summary=False)
    exact = sol.exact
    one = unit(exact)
    last = sol.n_star - 1
    v_last = sol.pre_values[last]
    base = N * v_last / last
    for n in range(1, sol.n_star):
        tail = sum((one / (k - 1) for k in range(n + 1, last + 1)), one * 0)
        if 1 >= base + tail:
            return n
    return sol.n_star


def value_v(N: int, state: PosteriorState, exact: bool | None = None) -> Number:
    """Optimal continuation value of Player 2 after rejecting in ``state``."""
    return solve_game(N, exact=exact, summary=False).value(state)


def solve_game(N: int, exact: bool | None = None, summary: bool = True) -> GameSolution:
    """Solve the game: Player 1's threshold rule and Player 2's best response.

    With ``summary`` the solution also carries an a-priori description of
    Player 2's strategy (see :mod:`stackstop.strategy`).
    """
    _check_range(N)
    exact = use_exact(N, exact)
    if summary:
        return _with_summary(N, exact)
    return _solve(N, exact)


@lru_cache(maxsize=32)
def _with_summary(N: int, exact: bool) -> GameSolution:
    from .strategy import a_priori_strategy

    sol = _solve(N, exact)
    return replace(sol, strategy_summary=tuple(a_priori_strategy(sol)))


@lru_cache(maxsize=32)
def _solve(N: int, exact: bool) -> GameSolution:
    one = unit(exact)
    p1 = solve_p1(N, exact)
    n_star = p1.threshold
    q = {n: q_threshold(N, n, exact, n_star) for n in range(n_star + 1, N + 1)}
    solver = _Solver(N, n_star, q, exact)
    limit = sys.getrecursionlimit()
    if limit < 4 * N + 200:
        sys.setrecursionlimit(4 * N + 200)
    for n in range(N, n_star - 2, -1):
        solver.searching(n)
    pre = _pre_threshold(N, n_star, solver.searching(n_star - 1), one)
    solver.pre = pre
    n0 = _first_pre_acceptance(N, n_star, pre, one)
    n1 = next((n for n in range(n_star + 1, N + 1) if one / 2 >= q[n]), None)
    if n0 == 1:
        n1 = None  # Player 2 takes the very first object
    return GameSolution(
        n_objects=N,
        n_star=n_star,
        n0=n0,
        n1=n1,
        u1=p1.value,
        u2=pre[0],
        q_table=q,
        exact=exact,
        v_cache=solver.cache,
        pre_values=pre,
        _solver=solver,
    )
