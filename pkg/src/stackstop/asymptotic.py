"""Large-N limit: time thresholds, and upper and lower bounds on Player 2's value.

Time ``t`` is the proportion of objects already seen.  Player 1 accepts the
first relatively best object after ``1/e``.  The value functions below are
piecewise combinations of ``t**i * ln(t)**j``; :class:`LogPoly` integrates
them in closed form, so no quadrature is involved.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from scipy.stats import poisson

INV_E = math.exp(-1.0)
TOL = 1e-12
MAX_ITER = 10_000
MAX_MEMORY = 8

TABLE_M = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20, 50, 100, 200, 500, 1000, 10_000, 100_000, 1_000_000)


def asymptotic_q(t: float) -> float:
    """Posterior threshold for accepting a candidate at time ``t`` >= 1/e."""
    if not INV_E - 1e-15 <= t <= 1:
        raise ValueError("t must lie in [1/e, 1]")
    return (1 - t) / (2 - t + math.log(t))


def solve_threshold_t(m: int) -> float:
    """Time from which the m-th candidate after 1/e is accepted under the count rule.

    Fixed point of ``t = exp((1 - m - t)/m)``; a damped iteration with the
    step scaled by the local slope converges in a handful of steps.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    t = 0.5
    for _ in range(MAX_ITER):
        g = math.exp((1 - m - t) / m)
        # g'(t) = -g/m, so this is a Newton step on t - g(t)
        nxt = t - (t - g) / (1 + g / m)
        if abs(nxt - t) < TOL:
            return nxt
        t = nxt
    raise RuntimeError(f"threshold iteration for m={m} did not converge")


@lru_cache(maxsize=None)
def threshold(m: int) -> float:
    return solve_threshold_t(m)


def threshold_table(ms=TABLE_M) -> dict[int, float]:
    return {m: threshold(m) for m in ms}


class LogPoly:
    """Finite sum of ``c * t**i * ln(t)**j`` with integer ``i`` and ``j >= 0``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], float] | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0.0}

    @classmethod
    def const(cls, c: float) -> LogPoly:
        return cls({(0, 0): c})

    def __add__(self, other: LogPoly) -> LogPoly:
        out = defaultdict(float, self.terms)
        for k, v in other.terms.items():
            out[k] += v
        return LogPoly(out)

    def __sub__(self, other: LogPoly) -> LogPoly:
        return self + other.scale(-1.0)

    def scale(self, c: float) -> LogPoly:
        return LogPoly({k: c * v for k, v in self.terms.items()})

    def shift(self, power: int) -> LogPoly:
        """Multiply by ``t**power``."""
        return LogPoly({(i + power, j): v for (i, j), v in self.terms.items()})

    def __call__(self, t: float) -> float:
        lt = math.log(t)
        return sum(v * t**i * lt**j for (i, j), v in self.terms.items())

    def antiderivative(self) -> LogPoly:
        out: dict[tuple[int, int], float] = defaultdict(float)
        for (i, j), v in self.terms.items():
            a = i + 1
            if a == 0:
                out[(0, j + 1)] += v / (j + 1)
                continue
            # integral of s^i ln^j s, by parts j times
            coef = v / a
            for r in range(j + 1):
                out[(a, j - r)] += coef
                coef *= -(j - r) / a
        return LogPoly(out)

    def integral(self, lo: float, hi: float) -> float:
        F = self.antiderivative()
        return F(hi) - F(lo)

    def __repr__(self):
        return f"LogPoly({dict(sorted(self.terms.items()))})"


@dataclass(frozen=True)
class PiecewiseValue:
    """Piecewise function on [breaks[0], breaks[-1]]; piece i covers [breaks[i], breaks[i+1])."""

    breaks: tuple[float, ...]
    pieces: tuple[LogPoly, ...]

    def _index(self, t: float) -> int:
        if not self.breaks[0] - 1e-12 <= t <= self.breaks[-1] + 1e-12:
            raise ValueError(f"t={t} outside [{self.breaks[0]}, {self.breaks[-1]}]")
        for i in range(len(self.pieces) - 1, -1, -1):
            if t >= self.breaks[i]:
                return i
        return 0

    def __call__(self, t: float) -> float:
        return self.pieces[self._index(t)](t)

    def left_limit(self, i: int) -> float:
        """Value of piece i-1 at breaks[i] (for continuity checks)."""
        return self.pieces[i - 1](self.breaks[i])

    def weighted_integral(self, lo: float, hi: float, power: int) -> float:
        """Integral of f(s) * s**power over [lo, hi]."""
        total = 0.0
        for a, b, f in zip(self.breaks, self.breaks[1:], self.pieces):
            a, b = max(a, lo), min(b, hi)
            if a < b:
                total += f.shift(power).integral(a, b)
        return total


def w_approx_t(t: float, m: int) -> float:
    """Reward from accepting the next candidate when the current posterior is taken as m/(m+1)."""
    return t * (-m * math.log(t) + 1 - t) / (m + 1)


def _w_approx_poly(m: int) -> LogPoly:
    return LogPoly({(1, 1): -m / (m + 1), (1, 0): 1 / (m + 1), (2, 0): -1 / (m + 1)})


@dataclass(frozen=True)
class UpperBound:
    """Bound from the game in which Player 2 learns the relative rank of each rejected candidate."""

    t1: float
    c1: float
    c2: float
    c3: float
    t0: float

    def u_rank2(self, t: float) -> float:
        """Value after rejecting a relative-rank-2 candidate (or none yet) at t >= 1/e."""
        if t >= self.t1:
            return t * (1 - t)
        return self.c1 * t + t * math.log(t) ** 2 / 2

    def u_searching(self, t: float) -> float:
        """Value while Player 1 is still searching."""
        lt = math.log(t)
        if t >= self.t1:
            return t * (t - 1 - lt)
        if t >= INV_E:
            return self.c2 * t - self.c1 * t * lt - t * lt**3 / 6
        if t >= self.t0:
            return self.c3 * t - t * lt
        return self.t0

    def to_dict(self) -> dict:
        return {"t1": self.t1, "c1": self.c1, "c2": self.c2, "c3": self.c3, "t0_u": self.t0}


def upper_bound() -> UpperBound:
    t1 = threshold(1)
    c1 = 1 - t1 - t1**2 / 2
    c2 = t1 + t1**2 + t1**3 / 3 - 1
    c3 = (3 * t1**2 + 2 * t1**3 - 5) / 6
    return UpperBound(t1=t1, c1=c1, c2=c2, c3=c3, t0=math.exp(c3 - 1))


@dataclass(frozen=True)
class LowerBound:
    """Values of the count rule that remembers at most ``k`` candidates after 1/e."""

    k: int
    t0: float
    thresholds: tuple[float, ...]  # t_1 .. t_{k+1}
    values: Mapping[int, PiecewiseValue] = field(repr=False)  # m = -1 .. k on [1/e, 1]
    pre_constant: float = 0.0  # v(t,-1) = -t ln t + c t on [t0, 1/e)

    @property
    def value(self) -> float:
        return self.t0

    def v(self, t: float, m: int) -> float:
        if m == -1 and t < INV_E:
            if t <= self.t0:
                return self.t0
            return -t * math.log(t) + self.pre_constant * t
        return self.values[m](t)

    def to_dict(self) -> dict:
        return {"k": self.k, "t0": self.t0, "value": self.value, "v_at_inv_e": self.values[-1](INV_E)}


@lru_cache(maxsize=None)
def lower_bound(k: int) -> LowerBound:
    """Build v^k(t, m) for m = k, ..., 0, -1 on [1/e, 1] and the earliest acceptance time.

    Pieces follow the threshold grid 1/e < t_{k+1} < ... < t_1 < 1.  For
    t >= t_{m+1} the next candidate is always accepted; below, condition on
    the time of the next candidate.
    """
    if not 0 <= k <= MAX_MEMORY:
        raise ValueError(f"memory size must lie in 0..{MAX_MEMORY}, got {k}")
    ts = [threshold(m) for m in range(1, k + 2)]  # ts[m-1] = t_m
    breaks = (INV_E, *reversed(ts), 1.0)
    n_pieces = len(breaks) - 1

    def piece_of(m_thr: float) -> int:
        return breaks.index(m_thr)

    values: dict[int, PiecewiseValue] = {}
    # memory full: constant below t_{k+1}
    tk = ts[k]
    const_k = ((k * k + k + 1) * tk - tk * tk) / (k + 1) ** 2
    values[k] = PiecewiseValue(breaks, tuple(
        LogPoly.const(const_k) if i == 0 else _w_approx_poly(k) for i in range(n_pieces)
    ))
    for m in range(k - 1, -1, -1):
        up = values[m + 1]
        top = ts[m]  # t_{m+1}
        p = m / (m + 1)
        tail_a = p * -math.log(top)  # integral of p/s over [top, 1]
        tail_b = (1 / top - 1) / (m + 1)  # integral of 1/((m+1) s^2)
        pieces = []
        for i in range(n_pieces):
            lo, hi = breaks[i], breaks[i + 1]
            if lo >= top:
                pieces.append(_w_approx_poly(m))
                continue
            # alpha(t) = p * int_t^top v(s,m+1)/s^2 ds + tail_a, beta likewise with 2/(m+1) and s^-3
            f = up.pieces[i]
            g1 = f.shift(-2).antiderivative()
            g2 = f.shift(-3).antiderivative()
            a0 = p * (g1(hi) + up.weighted_integral(hi, top, -2)) + tail_a
            b0 = 2 / (m + 1) * (g2(hi) + up.weighted_integral(hi, top, -3)) + tail_b
            alpha = LogPoly.const(a0) - g1.scale(p)
            beta = LogPoly.const(b0) - g2.scale(2 / (m + 1))
            pieces.append(alpha.shift(1) + beta.shift(2))
        values[m] = PiecewiseValue(breaks, tuple(pieces))
    # Player 1 still searching: she accepts the next relatively best object
    zero = values[0]
    pieces = []
    for i in range(n_pieces):
        lo, hi = breaks[i], breaks[i + 1]
        g = zero.pieces[i].shift(-2).antiderivative()
        c = g(hi) + zero.weighted_integral(hi, 1.0, -2)
        pieces.append((LogPoly.const(c) - g).shift(1))
    values[-1] = PiecewiseValue(breaks, tuple(pieces))
    c = math.e * values[-1](INV_E) - 1
    t0 = math.exp(c - 1)
    return LowerBound(k=k, t0=t0, thresholds=tuple(ts), values=values, pre_constant=c)


def memory_one_closed_form() -> dict[str, float]:
    """Constants of the hand-derived k = 1 lower bound, for cross-checking :func:`lower_bound`.

    On [t2, t1): v(t,0) = t^2 ln t - t ln t + c1 t^2 and
    v(t,-1) = t ln^2 t / 2 - t^2 ln t + (1 - c1) t^2 + c2 t.
    On [1/e, t2): v(t,1) = c3, v(t,0) = c3 + c4 t^2, v(t,-1) = c3 - c4 t^2 + c5 t.
    Below 1/e: v(t,-1) = -t ln t + c6 t.
    """
    t1, t2 = threshold(1), threshold(2)
    c1 = 1 / t1 + t1 - 2
    c2 = -t1 - t1**2 / 2
    c3 = (3 * t2 - t2**2) / 4
    c4 = (1 - 2 * t2) / 4 - 1 / (4 * t2) + c1
    c5 = c2 + 5 * (t2**2 - 1) / 8 + t2 * (2 - c1 + c4)
    c6 = c5 - 1 - c4 * INV_E + math.e * c3
    return {"t1": t1, "t2": t2, "c1": c1, "c2": c2, "c3": c3, "c4": c4, "c5": c5, "c6": c6, "t0": math.exp(c6 - 1)}


def truncation_bound(k: int) -> float:
    """Bound on the value lost by remembering only ``k`` candidates.

    At least k+2 candidates must appear in (1/e, t_{k+1}); their number is
    Poisson with mean 2(1 - t_{k+1})/(k+1).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    t = threshold(k + 1)
    lam = 2 * (1 - t) / (k + 1)
    return (k * t + t * t) / (k + 1) ** 2 * float(poisson.sf(k + 1, lam))


def bounds_table(ks=(0, 1, 2, 3)) -> list[dict]:
    return [{"k": k, "truncation_bound": truncation_bound(k), "lower_bound": lower_bound(k).value} for k in ks]
