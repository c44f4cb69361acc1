"""Posterior probability that Player 2's current candidate is relatively best.

After Player 1 has taken an object, a candidate for Player 2 has relative
rank 1 or 2 in the original sequence.  The probability of rank 1 depends on
the moments at which the earlier post-threshold candidates appeared.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._numeric import Number

# Sentinel counts for PosteriorState.count
P1_SEARCHING = -1
NO_CANDIDATE = 0


@dataclass(frozen=True)
class PosteriorState:
    """Player 2's information state at (or just after) a decision point.

    ``count == -1``: Player 1 has not accepted anything yet (no ``p``).
    ``count == 0``: Player 1 has accepted, no candidate since (``p = 0``).
    ``count >= 1``: ``p`` is the posterior of the ``count``-th candidate seen
    after Player 1's threshold.  ``history`` optionally records the candidate
    moments that produced ``p``.
    """

    moment: int
    count: int
    p: Number | None = None
    history: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.count < -1:
            raise ValueError("count must be >= -1")
        if self.count == P1_SEARCHING and self.p is not None:
            raise ValueError("no posterior is defined while Player 1 is searching")
        if self.count == NO_CANDIDATE and self.p not in (None, 0):
            raise ValueError("the no-candidate state carries p = 0")
        if self.count >= 1:
            if self.p is None:
                if self.history is None:
                    raise ValueError("a candidate state needs p or a history")
                object.__setattr__(self, "p", posterior_from_history(self.history))
            if not 0 <= self.p <= 1:
                raise ValueError("p must lie in [0, 1]")
            if self.history is not None and len(self.history) != self.count:
                raise ValueError("history length must equal count")


def update_posterior(n: int, k: int, p: Number) -> Number:
    """Posterior of the next candidate at moment ``k`` given the previous one
    appeared at ``n`` with posterior ``p``.

    Works in exact arithmetic when ``p`` is a ``Fraction``.
    """
    if k <= n:
        raise ValueError(f"next candidate moment k={k} must exceed n={n}")
    if n < 2:
        raise ValueError("candidate moments after the threshold are at least 2")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if p == 1:
        return p
    miss = (n - 1) * (1 - p)
    return 1 - miss / ((k - 2) * p + 2 * miss)


def posterior_from_history(moments: Sequence[int], n_star: int | None = None, exact: bool = False) -> Number:
    """Fold :func:`update_posterior` over a history of candidate moments.

    The first candidate after the threshold has posterior 1/2.  An empty
    history means no candidate yet and returns 0.
    """
    moments = tuple(moments)
    half = Fraction(1, 2) if exact else 0.5
    if not moments:
        return half * 0
    if any(b <= a for a, b in zip(moments, moments[1:])):
        raise ValueError("candidate moments must be strictly increasing")
    if n_star is not None and moments[0] <= n_star:
        raise ValueError("the first candidate must appear after the threshold")
    p = half
    for a, b in zip(moments, moments[1:]):
        p = update_posterior(a, b, p)
    return p


def asymptotic_update(s_prev: float, s_next: float, p: float) -> float:
    """Continuous-time analogue of :func:`update_posterior` (times in [1/e, 1])."""
    if not s_prev < s_next:
        raise ValueError("candidate times must be strictly increasing")
    if s_prev <= 0 or s_next > 1:
        raise ValueError("times must lie in (0, 1]")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if p == 1:
        return 1.0
    return (s_next * p + s_prev * (1 - p)) / (s_next * p + 2 * s_prev * (1 - p))
